#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guireplay/detect.hpp"
#include "guireplay/types.hpp"

namespace guireplay::profile {

struct ShapeTuple {
    int width = 0;
    int height = 0;
    long long area = 0;
    double aspect_ratio = 0.0;  // width / height

    bool operator==(const ShapeTuple& o) const {
        return width == o.width && height == o.height && area == o.area &&
               aspect_ratio == o.aspect_ratio;
    }
};

/// Indices into the owning snapshot's widget list.
struct NeighborSet {
    std::optional<int> parent;
    std::optional<int> up;
    std::optional<int> down;
    std::optional<int> left;
    std::optional<int> right;
};

struct WidgetProfile {
    Bbox location;
    ShapeTuple shape;
    PixelImage clip;
    FeatureVector clip_embedding;
    std::optional<std::string> text;
    NeighborSet neighbors;
    double norm_cx = 0.0;  // bbox centre as a fraction of image width
    double norm_cy = 0.0;
};

struct DeviceTag {
    std::string name;
    int width = 0;
    int height = 0;
    double dpi = 160.0;
    bool photo = false;

    bool known() const { return width > 0 && height > 0; }
};

struct GuiSnapshot {
    PixelImage image;
    std::vector<detect::RawWidget> widgets;
    std::vector<WidgetProfile> profiles;  // index-aligned with widgets
    DeviceTag device_tag;
    int page_offset = -1;  // -1 when unknown
    std::string digest;    // canonical image digest

    size_t size() const { return widgets.size(); }
    int screen_width() const { return device_tag.known() ? device_tag.width : image.width; }
    int screen_height() const { return device_tag.known() ? device_tag.height : image.height; }
};

ShapeTuple compute_shape(const Bbox& box);

/// Smallest-area container whose bbox strictly contains widget `idx`.
std::optional<int> find_parent(int idx, const std::vector<detect::RawWidget>& widgets);

/// Nearest widget per direction with >= 1 px perpendicular projection overlap;
/// the widget's container ancestors are excluded.
NeighborSet find_neighbors(int idx, const std::vector<detect::RawWidget>& widgets);

/// Completes profiles (clip, embedding, shape, neighbors) for detected widgets.
GuiSnapshot build_profiles(PixelImage image, std::vector<detect::RawWidget> widgets,
                           DeviceTag tag = {}, int page_offset = -1);

/// Full pipeline: text provider + non-text detector + merge + profiles.
GuiSnapshot detect_gui(const PixelImage& img, const detect::TextProvider& provider,
                       const detect::DetectConfig& cfg, DeviceTag tag = {},
                       int page_offset = -1);

}  // namespace guireplay::profile
