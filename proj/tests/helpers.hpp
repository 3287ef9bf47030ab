#pragma once

// Shared fixture builders: synthetic snapshots with controlled attributes and
// small hand-drawn rasters.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/detect.hpp"
#include "guireplay/imaging.hpp"
#include "guireplay/profile.hpp"
#include "guireplay/types.hpp"

namespace testutil {

using namespace guireplay;

struct WidgetSpec {
    Bbox box;
    detect::WidgetKind kind = detect::WidgetKind::NonText;
    bool container = false;
    std::optional<std::string> text;
    FeatureVector embedding;  // unit-length, kFeatureDims
};

inline FeatureVector unit_axis(int i) {
    FeatureVector v(kFeatureDims, 0.0);
    v[i % kFeatureDims] = 1.0;
    return v;
}

/// cos(result, unit_axis(i)) == c exactly (up to the representation of c).
inline FeatureVector unit_mix(int i, int j, double c) {
    FeatureVector v(kFeatureDims, 0.0);
    v[i % kFeatureDims] = c;
    v[j % kFeatureDims] = std::sqrt(1.0 - c * c);
    return v;
}

/// Builds a snapshot around hand-specified profiles. The image is a flat
/// canvas; clips are 1x1 dummies since the matcher reads embeddings.
inline profile::GuiSnapshot make_snapshot(int w, int h, const std::vector<WidgetSpec>& specs,
                                          const std::string& device = "dev") {
    profile::GuiSnapshot s;
    s.image = PixelImage(2, 2, 255, 255, 255);
    s.digest = "synthetic";
    s.device_tag = {device, w, h, 160.0, false};
    for (const WidgetSpec& spec : specs) {
        detect::RawWidget rw;
        rw.bbox = spec.box;
        rw.kind = spec.kind;
        rw.is_container = spec.container;
        rw.text = spec.text;
        s.widgets.push_back(rw);

        profile::WidgetProfile p;
        p.location = spec.box;
        p.shape = profile::compute_shape(spec.box);
        p.clip = PixelImage(1, 1, 128, 128, 128);
        p.clip_embedding = spec.embedding.empty() ? unit_axis(0) : spec.embedding;
        p.text = spec.text;
        p.norm_cx = (spec.box.left + spec.box.right) / 2.0 / w;
        p.norm_cy = (spec.box.top + spec.box.bottom) / 2.0 / h;
        s.profiles.push_back(std::move(p));
    }
    for (size_t i = 0; i < s.widgets.size(); ++i)
        s.profiles[i].neighbors = profile::find_neighbors(static_cast<int>(i), s.widgets);
    return s;
}

inline void fill_rect(PixelImage& img, const Bbox& b, std::uint8_t r, std::uint8_t g,
                      std::uint8_t bl) {
    for (int y = b.top; y < b.bottom; ++y)
        for (int x = b.left; x < b.right; ++x) img.set(x, y, r, g, bl);
}

inline PixelImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return PixelImage(w, h, r, g, b);
}

}  // namespace testutil
