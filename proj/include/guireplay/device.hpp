#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/page.hpp"
#include "guireplay/profile.hpp"
#include "guireplay/render.hpp"
#include "guireplay/text_provider.hpp"
#include "guireplay/types.hpp"

namespace guireplay::farm {

struct ConcreteAction {
    ActionType type = ActionType::Click;
    int x = 0, y = 0;    // start point (screen coordinates)
    int x2 = 0, y2 = 0;  // end point for scroll/swipe gestures
    std::string text;    // Input payload
    int duration_ms = 0; // LongPress

    /// Gesture helper: drag from (x,y) to (x,y-d) scrolls the content down.
    static ConcreteAction scroll_v(int cx, int cy, int distance) {
        return {ActionType::ScrollV, cx, cy, cx, cy - distance, "", 0};
    }
    static ConcreteAction swipe_h(int cx, int cy, int distance) {
        return {ActionType::SwipeH, cx, cy, cx - distance, cy, "", 0};
    }
};

/// State transition for one executed action. Unknown coordinates are a no-op,
/// like a tap on dead space.
DeviceState apply_action(const PageSet& pages, const DeviceState& state,
                         const ConcreteAction& action);

/// What the engine is allowed to see of a device: pixels in, actions out.
class DeviceHandle {
public:
    virtual ~DeviceHandle() = default;
    virtual PixelImage screenshot() = 0;
    virtual void execute(const ConcreteAction& action) = 0;
    /// True when screenshots are camera photos needing screen extraction.
    virtual bool photo_source() const = 0;
    virtual profile::DeviceTag tag() const = 0;
};

/// In-process simulated device. Also carries the harness-only sidebands
/// (ground truth, forced scrolls) that the matcher never sees.
class SimulatedDevice : public DeviceHandle {
public:
    SimulatedDevice(const PageSet* pages, DeviceState initial,
                    std::shared_ptr<detect::TextRegistry> registry);

    PixelImage screenshot() override;
    void execute(const ConcreteAction& action) override;
    bool photo_source() const override { return state_.profile.kind == DeviceKind::PhysicalPhoto; }
    profile::DeviceTag tag() const override;

    // Harness sidebands.
    const DeviceState& state() const { return state_; }
    void reset(const std::string& page, int offset = 0);
    void force_scroll(int offset);
    void set_volatile(bool enabled) { volatile_enabled_ = enabled; }
    std::vector<GroundTruthEntry> current_ground_truth() const;
    const std::vector<GroundTruthEntry>& gt_at_last_execute() const { return last_exec_gt_; }
    int content_len() const;
    int viewport_len() const;
    const PageSet& pages() const { return *pages_; }

private:
    RenderOutput render_now() const;
    std::uint64_t noise_seed() const;

    const PageSet* pages_;
    DeviceState state_;
    std::shared_ptr<detect::TextRegistry> registry_;
    bool volatile_enabled_ = false;
    std::vector<GroundTruthEntry> last_exec_gt_;
};

}  // namespace guireplay::farm
