#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/text_provider.hpp"
#include "guireplay/types.hpp"

namespace guireplay::detect {

enum class WidgetKind { Text, NonText };

/// Detector output before profile extraction.
struct RawWidget {
    Bbox bbox;
    WidgetKind kind = WidgetKind::NonText;
    bool is_container = false;
    std::optional<std::string> text;
};

struct DetectConfig {
    int grad_threshold = 8;        // gradient binarization cutoff
    int min_area = 25;             // px^2 at 160 dpi, scaled by (dpi/160)^2
    double dpi = 160.0;
    double rect_coverage = 0.9;    // bbox-perimeter coverage for containers
    int border_band = 3;           // px band used by the border-touch test
    int refine_tolerance = 12;     // max-channel diff vs local background
    long long scaled_min_area() const;
};

struct ScreenRegion {
    Bbox bbox;
    PixelImage screen_image;
};

/// Non-text pipeline: grayscale -> gradient binarization -> flood-fill
/// labelling -> background-snap box refinement -> container recognition.
/// Regions nested inside non-containers are dropped; containers keep theirs.
std::vector<RawWidget> detect_nontext(const PixelImage& img, const DetectConfig& cfg);

/// Container test: (1) region pixels cover >= cfg.rect_coverage of its own
/// pixel-bbox perimeter and (2) no inner region has pixels inside the
/// candidate's border band.
bool recognize_container(const Region& candidate, const std::vector<Region>& inner,
                         const DetectConfig& cfg);

/// Variant used inside the pipeline: perimeter edges clipped by the image
/// border (viewport cut-offs) count as covered. img_w/img_h <= 0 disables.
bool recognize_container_clipped(const Region& candidate, const std::vector<Region>& inner,
                                 const DetectConfig& cfg, int img_w, int img_h);

/// Merge/cross-check: every text line becomes a Text widget; non-text widgets
/// intersecting a text box are discarded unless they are containers fully
/// enclosing the line(s), which absorb the concatenated content instead.
std::vector<RawWidget> merge_text_nontext(const std::vector<TextLine>& texts,
                                          const std::vector<RawWidget>& nontexts);

/// Screen-region heuristic for photos: the unique candidate taller than half
/// the photo that contains >= 2 widgets and is contained by none.
ScreenRegion extract_screen_region(const PixelImage& photo, const DetectConfig& cfg);

/// provider -> detect_nontext -> merge; ordered (top, left).
std::vector<RawWidget> detect_widgets(const PixelImage& img, const TextProvider& provider,
                                      const DetectConfig& cfg);

}  // namespace guireplay::detect
