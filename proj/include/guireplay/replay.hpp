#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/device.hpp"
#include "guireplay/match.hpp"
#include "guireplay/profile.hpp"
#include "guireplay/text_provider.hpp"

namespace guireplay::replay {

using farm::ActionType;
using farm::ConcreteAction;

/// One recorded user action plus the vision context it was recorded in.
/// Immutable once captured.
struct ActionRecord {
    ActionType type = ActionType::Click;
    Point point;               // source GUI coordinates (widget-dependent)
    int distance = 0;          // signed px along the gesture axis
    std::string text_payload;  // Input
    int duration_ms = 0;       // LongPress
    profile::GuiSnapshot source_before;
    std::optional<profile::GuiSnapshot> source_after;  // widget-independent only
    std::optional<int> source_widget;                  // index into source_before

    bool widget_dependent() const { return farm::widget_dependent(type); }
};

enum class ReplayStatus { Replayed, WidgetNotFound, MarginReached, DeviceIOFailure };
const char* status_name(ReplayStatus s);

struct MatchLogEntry {
    int source_widget = -1;
    std::string stage;
    int candidates_considered = 0;
    std::optional<int> matched_widget;
    double similarity = 0.0;
};

struct ReplayOutcome {
    ReplayStatus status = ReplayStatus::WidgetNotFound;
    std::optional<Point> executed_point;  // GUI coordinates on the target
    int scroll_steps_used = 0;
    double gui_fraction = 0.0;  // widget-independent: last fraction seen
    std::vector<MatchLogEntry> logs;
};

/// Shared digest-keyed snapshot cache. Screenshots repeat across sweeps and
/// devices; detection is deterministic, so one detect per unique frame.
class SnapshotCache {
public:
    std::shared_ptr<const profile::GuiSnapshot> get(const std::string& digest) const;
    void put(const std::string& digest, std::shared_ptr<const profile::GuiSnapshot> snap);

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const profile::GuiSnapshot>> entries_;
};

/// The vision pipeline over a device handle: screenshot, screen-region
/// extraction for photo sources, detection, profiling.
class VisionDevice {
public:
    VisionDevice(farm::DeviceHandle& dev, const detect::TextProvider& provider,
                 detect::DetectConfig dcfg, std::shared_ptr<SnapshotCache> cache = nullptr);

    std::shared_ptr<const profile::GuiSnapshot> snapshot();
    void execute(const ConcreteAction& action);
    farm::DeviceHandle& handle() { return *dev_; }
    const detect::DetectConfig& detect_config() const { return dcfg_; }

private:
    farm::DeviceHandle* dev_;
    const detect::TextProvider* provider_;
    detect::DetectConfig dcfg_;
    std::shared_ptr<SnapshotCache> cache_;
};

/// Centre of the widget box, rounded toward the top-left.
Point tap_point_for_widget(const profile::WidgetProfile& w);

/// Captures source_before, resolves the tapped widget, executes the action on
/// the source, and captures source_after for widget-independent actions.
ActionRecord record_scripted_action(VisionDevice& source, ActionType type, Point point,
                                    int distance = 0, const std::string& text = "",
                                    int duration_ms = 0);

/// Match, act, and expand the search by screen-height scrolls: down to the
/// bottom margin, then up to the top margin.
ReplayOutcome replay_widget_dependent(const ActionRecord& rec, VisionDevice& target,
                                      const match::MatchConfig& cfg);

/// Probe by quarter-viewport gestures in the recorded direction until the
/// whole-GUI match holds or a margin is reached.
ReplayOutcome replay_widget_independent(const ActionRecord& rec, VisionDevice& target,
                                        const match::MatchConfig& cfg);

ReplayOutcome replay_action(const ActionRecord& rec, VisionDevice& target,
                            const match::MatchConfig& cfg);

}  // namespace guireplay::replay
