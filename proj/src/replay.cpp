#include "guireplay/replay.hpp"

#include <algorithm>

#include "guireplay/digest.hpp"
#include "guireplay/imaging.hpp"

namespace guireplay::replay {

namespace {

constexpr int kSweepCap = 256;  // safety net; margins terminate sweeps long before

MatchLogEntry to_log(int ws_idx, const match::MatchResult& r) {
    MatchLogEntry e;
    e.source_widget = ws_idx;
    e.stage = match::stage_name(r.stage);
    e.candidates_considered = r.candidates_considered;
    e.matched_widget = r.matched;
    e.similarity = r.similarity;
    return e;
}

long long screen_area(const profile::GuiSnapshot& s) {
    return static_cast<long long>(s.screen_width()) * s.screen_height();
}

}  // namespace

const char* status_name(ReplayStatus s) {
    switch (s) {
        case ReplayStatus::Replayed: return "Replayed";
        case ReplayStatus::WidgetNotFound: return "WidgetNotFound";
        case ReplayStatus::MarginReached: return "MarginReached";
        case ReplayStatus::DeviceIOFailure: return "DeviceIOError";
    }
    return "Unknown";
}

std::shared_ptr<const profile::GuiSnapshot> SnapshotCache::get(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(digest);
    return it == entries_.end() ? nullptr : it->second;
}

void SnapshotCache::put(const std::string& digest,
                        std::shared_ptr<const profile::GuiSnapshot> snap) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_[digest] = std::move(snap);
}

VisionDevice::VisionDevice(farm::DeviceHandle& dev, const detect::TextProvider& provider,
                           detect::DetectConfig dcfg, std::shared_ptr<SnapshotCache> cache)
    : dev_(&dev), provider_(&provider), dcfg_(dcfg), cache_(std::move(cache)) {}

std::shared_ptr<const profile::GuiSnapshot> VisionDevice::snapshot() {
    PixelImage shot = dev_->screenshot();
    std::string key = digest::image_digest(shot);
    if (cache_) {
        if (auto hit = cache_->get(key)) return hit;
    }
    PixelImage gui = std::move(shot);
    if (dev_->photo_source())
        gui = detect::extract_screen_region(gui, dcfg_).screen_image;
    auto snap = std::make_shared<profile::GuiSnapshot>(
        profile::detect_gui(gui, *provider_, dcfg_, dev_->tag()));
    if (cache_) cache_->put(key, snap);
    return snap;
}

void VisionDevice::execute(const ConcreteAction& action) { dev_->execute(action); }

Point tap_point_for_widget(const profile::WidgetProfile& w) {
    return {(w.location.left + w.location.right) / 2, (w.location.top + w.location.bottom) / 2};
}

ActionRecord record_scripted_action(VisionDevice& source, ActionType type, Point point,
                                    int distance, const std::string& text, int duration_ms) {
    ActionRecord rec;
    rec.type = type;
    rec.point = point;
    rec.distance = distance;
    rec.text_payload = text;
    rec.duration_ms = duration_ms;

    auto before = source.snapshot();
    rec.source_before = *before;

    if (rec.widget_dependent()) {
        std::optional<int> hit;
        long long best_area = 0;
        for (size_t i = 0; i < before->size(); ++i) {
            const Bbox& b = before->widgets[i].bbox;
            if (!b.contains_point(point.x, point.y)) continue;
            if (!hit || b.area() < best_area) {
                hit = static_cast<int>(i);
                best_area = b.area();
            }
        }
        if (!hit)
            throw RecordError("record: point (" + std::to_string(point.x) + "," +
                              std::to_string(point.y) + ") hits no detected widget");
        rec.source_widget = hit;
        ConcreteAction a{type, point.x, point.y, point.x, point.y, text, duration_ms};
        source.execute(a);
    } else {
        ConcreteAction a = type == ActionType::ScrollV
                               ? ConcreteAction::scroll_v(before->image.width / 2,
                                                          before->image.height / 2, distance)
                               : ConcreteAction::swipe_h(before->image.width / 2,
                                                         before->image.height / 2, distance);
        source.execute(a);
        rec.source_after = *source.snapshot();
    }
    return rec;
}

namespace {

struct Attempt {
    bool ok = false;
    Point point;
    int matched = -1;
};

Attempt try_widget(const ActionRecord& rec, const profile::GuiSnapshot& snap,
                   const match::MatchConfig& cfg, ReplayOutcome& out) {
    match::MatchResult res =
        match::match_widget(*rec.source_widget, rec.source_before, snap, cfg);
    out.logs.push_back(to_log(*rec.source_widget, res));
    Attempt a;
    if (res.matched) {
        a.ok = true;
        a.matched = *res.matched;
        a.point = tap_point_for_widget(snap.profiles[*res.matched]);
    }
    return a;
}

}  // namespace

ReplayOutcome replay_widget_dependent(const ActionRecord& rec, VisionDevice& target,
                                      const match::MatchConfig& cfg) {
    if (!rec.widget_dependent() || !rec.source_widget)
        throw ContractError("replay_widget_dependent: record is not widget-dependent");

    ReplayOutcome out;
    auto act = [&](const Attempt& a) {
        ConcreteAction exec{rec.type, a.point.x, a.point.y, a.point.x, a.point.y,
                            rec.text_payload, rec.duration_ms};
        target.execute(exec);
        out.status = ReplayStatus::Replayed;
        out.executed_point = a.point;
    };

    auto snap = target.snapshot();
    Attempt first = try_widget(rec, *snap, cfg, out);
    if (first.ok) {
        act(first);
        return out;
    }

    const int screen_h = snap->image.height;
    const int cx = snap->image.width / 2, cy = snap->image.height / 2;

    // Downward sweep to the bottom margin.
    for (int i = 0; i < kSweepCap; ++i) {
        auto before = snap;
        target.execute(ConcreteAction::scroll_v(cx, cy, screen_h));
        snap = target.snapshot();
        if (match::gui_unchanged_same_device(before->image, snap->image, cfg)) break;
        ++out.scroll_steps_used;
        Attempt a = try_widget(rec, *snap, cfg, out);
        if (a.ok) {
            act(a);
            return out;
        }
    }
    // Upward sweep back past the start to the top margin.
    for (int i = 0; i < kSweepCap; ++i) {
        auto before = snap;
        target.execute(ConcreteAction::scroll_v(cx, cy, -screen_h));
        snap = target.snapshot();
        if (match::gui_unchanged_same_device(before->image, snap->image, cfg)) break;
        ++out.scroll_steps_used;
        Attempt a = try_widget(rec, *snap, cfg, out);
        if (a.ok) {
            act(a);
            return out;
        }
    }
    out.status = ReplayStatus::WidgetNotFound;
    return out;
}

ReplayOutcome replay_widget_independent(const ActionRecord& rec, VisionDevice& target,
                                        const match::MatchConfig& cfg) {
    if (rec.widget_dependent() || !rec.source_after)
        throw ContractError("replay_widget_independent: record is not widget-independent");
    const profile::GuiSnapshot& goal = *rec.source_after;

    ReplayOutcome out;
    auto gui_matches = [&](const profile::GuiSnapshot& current) {
        const profile::GuiSnapshot* small = &current;
        const profile::GuiSnapshot* large = &goal;
        if (screen_area(current) > screen_area(goal)) std::swap(small, large);
        match::GuiMatch gm = match::match_gui_cross_device(*small, *large, cfg);
        out.gui_fraction = gm.fraction;
        return gm.matched;
    };

    auto snap = target.snapshot();
    const bool horizontal = rec.type == ActionType::SwipeH;
    const int viewport = horizontal ? snap->image.width : snap->image.height;
    const int step = std::max(1, viewport / 4) * (rec.distance >= 0 ? 1 : -1);
    const int cx = snap->image.width / 2, cy = snap->image.height / 2;

    if (gui_matches(*snap)) {
        out.status = ReplayStatus::Replayed;
        out.executed_point = Point{cx, cy};
        return out;
    }
    for (int i = 0; i < kSweepCap; ++i) {
        auto before = snap;
        target.execute(horizontal ? ConcreteAction::swipe_h(cx, cy, step)
                                  : ConcreteAction::scroll_v(cx, cy, step));
        snap = target.snapshot();
        ++out.scroll_steps_used;
        bool at_margin = match::gui_unchanged_same_device(before->image, snap->image, cfg);
        if (gui_matches(*snap)) {
            out.status = ReplayStatus::Replayed;
            out.executed_point = Point{cx, cy};
            return out;
        }
        if (at_margin) {
            out.status = ReplayStatus::MarginReached;
            return out;
        }
    }
    out.status = ReplayStatus::MarginReached;
    return out;
}

ReplayOutcome replay_action(const ActionRecord& rec, VisionDevice& target,
                            const match::MatchConfig& cfg) {
    try {
        return rec.widget_dependent() ? replay_widget_dependent(rec, target, cfg)
                                      : replay_widget_independent(rec, target, cfg);
    } catch (const DeviceIOError&) {
        ReplayOutcome out;
        out.status = ReplayStatus::DeviceIOFailure;
        return out;
    }
}

}  // namespace guireplay::replay
