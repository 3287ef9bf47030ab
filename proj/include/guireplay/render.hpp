#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/detect.hpp"
#include "guireplay/page.hpp"
#include "guireplay/types.hpp"

namespace guireplay::farm {

enum class Skin { SkinA, SkinB };
enum class DeviceKind { Virtual, PhysicalPhoto };

struct DeviceProfile {
    std::string name;
    std::string model;
    int width = 0;
    int height = 0;
    double dpi = 160.0;
    Skin skin = Skin::SkinA;
    DeviceKind kind = DeviceKind::Virtual;
};

/// The eight built-in profiles (geometry per the experiment device table).
const std::vector<DeviceProfile>& list_profiles();
const DeviceProfile& profile_by_name(const std::string& name);

struct DeviceState {
    DeviceProfile profile;
    std::string current_page;
    int scroll_offset = 0;
    std::uint64_t rng_seed = 0;
    std::uint64_t volatile_nonce = 0;  // bumped per render when ad volatility is on
    std::string last_input;            // Input payloads land here
};

/// Oracle channel: never exposed to the matcher.
struct GroundTruthEntry {
    std::string id;
    Bbox bbox;  // viewport coordinates
    detect::WidgetKind kind = detect::WidgetKind::NonText;
    std::optional<std::string> text;
};

/// Strips a rendered-instance suffix ("label#2" -> "label").
std::string abstract_id(const std::string& instance_id);

struct RenderOutput {
    PixelImage frame;
    std::vector<GroundTruthEntry> ground_truth;
    std::vector<detect::TextLine> text_lines;  // OCR-equivalent sideband
    int content_length = 0;                    // px along the scroll axis
    int clamped_offset = 0;
};

/// Deterministic responsive rasterization of one viewport.
RenderOutput render(const AbstractPage& page, const DeviceState& state);

/// Layout-only: page extent along its scroll axis on this profile.
int content_length(const AbstractPage& page, const DeviceProfile& profile);

int max_scroll_offset(const AbstractPage& page, const DeviceProfile& profile);

/// Photo simulation: frame pasted on a black pad with seeded margins, then
/// seeded truncated Gaussian pixel noise over the whole photo.
struct PhotoOutput {
    PixelImage photo;
    Bbox screen_box;  // paste location inside the photo
};
PhotoOutput compose_photo(const PixelImage& frame, std::uint64_t noise_seed);

/// Content-coordinate layout boxes: the harness oracle for corrections and
/// correspondence tables. Never consumed by the matcher.
struct ContentEntry {
    std::string id;  // instance id ("label#0", "btn", ...)
    Bbox box;        // content coordinates
    detect::WidgetKind kind = detect::WidgetKind::NonText;
    std::optional<std::string> text;
};
std::vector<ContentEntry> content_layout(const AbstractPage& page,
                                         const DeviceProfile& profile);

}  // namespace guireplay::farm
