#include "guireplay/device.hpp"

#include <algorithm>

#include "guireplay/digest.hpp"
#include "guireplay/imaging.hpp"

namespace guireplay::farm {

namespace {

int axis_distance(const AbstractPage& page, const ConcreteAction& a) {
    if (page.horizontal && a.type == ActionType::SwipeH) return a.x - a.x2;
    if (!page.horizontal && a.type == ActionType::ScrollV) return a.y - a.y2;
    return 0;
}

}  // namespace

DeviceState apply_action(const PageSet& pages, const DeviceState& state,
                         const ConcreteAction& action) {
    const AbstractPage& page = pages.require(state.current_page);
    DeviceState next = state;

    switch (action.type) {
        case ActionType::Click:
        case ActionType::LongPress:
        case ActionType::Input: {
            if (action.x < 0 || action.x >= state.profile.width || action.y < 0 ||
                action.y >= state.profile.height)
                return next;  // taps outside the screen are dead
            RenderOutput ro = render(page, state);
            if (action.type == ActionType::Input) next.last_input = action.text;

            // Hit chain: smallest box first, bubbling up to enclosing widgets.
            std::vector<const GroundTruthEntry*> hits;
            for (const GroundTruthEntry& e : ro.ground_truth)
                if (e.bbox.contains_point(action.x, action.y)) hits.push_back(&e);
            std::sort(hits.begin(), hits.end(),
                      [](const GroundTruthEntry* a, const GroundTruthEntry* b) {
                          return a->bbox.area() < b->bbox.area();
                      });
            for (const GroundTruthEntry* e : hits) {
                auto to = page.transition_target(abstract_id(e->id), action.type);
                if (to) {
                    next.current_page = *to;
                    next.scroll_offset = 0;
                    return next;
                }
            }
            return next;
        }
        case ActionType::ScrollV:
        case ActionType::SwipeH: {
            int dist = axis_distance(page, action);
            int max_off = max_scroll_offset(page, state.profile);
            next.scroll_offset = std::clamp(state.scroll_offset + dist, 0, max_off);
            return next;
        }
    }
    return next;
}

SimulatedDevice::SimulatedDevice(const PageSet* pages, DeviceState initial,
                                 std::shared_ptr<detect::TextRegistry> registry)
    : pages_(pages), state_(std::move(initial)), registry_(std::move(registry)) {
    if (!pages_) throw ContractError("SimulatedDevice: null page set");
    pages_->require(state_.current_page);
    int max_off = max_scroll_offset(pages_->require(state_.current_page), state_.profile);
    state_.scroll_offset = std::clamp(state_.scroll_offset, 0, max_off);
}

RenderOutput SimulatedDevice::render_now() const {
    return render(pages_->require(state_.current_page), state_);
}

std::uint64_t SimulatedDevice::noise_seed() const {
    return digest::mix_seed(state_.rng_seed,
                            state_.current_page + "@" + std::to_string(state_.scroll_offset),
                            state_.volatile_nonce);
}

PixelImage SimulatedDevice::screenshot() {
    if (volatile_enabled_) ++state_.volatile_nonce;
    RenderOutput ro = render_now();
    if (state_.profile.kind == DeviceKind::Virtual) {
        if (registry_) registry_->put(digest::image_digest(ro.frame), ro.text_lines);
        return ro.frame;
    }
    PhotoOutput photo = compose_photo(ro.frame, noise_seed());
    if (registry_) {
        // The engine detects on the extracted screen region; its crop equals
        // the paste rectangle, so its digest is known here.
        PixelImage region = imaging::crop(photo.photo, photo.screen_box);
        registry_->put(digest::image_digest(region), ro.text_lines);
    }
    return photo.photo;
}

void SimulatedDevice::execute(const ConcreteAction& action) {
    if (widget_dependent(static_cast<ActionType>(action.type)))
        last_exec_gt_ = render_now().ground_truth;
    state_ = apply_action(*pages_, state_, action);
}

profile::DeviceTag SimulatedDevice::tag() const {
    return {state_.profile.name, state_.profile.width, state_.profile.height,
            state_.profile.dpi, state_.profile.kind == DeviceKind::PhysicalPhoto};
}

void SimulatedDevice::reset(const std::string& page, int offset) {
    pages_->require(page);
    state_.current_page = page;
    state_.scroll_offset =
        std::clamp(offset, 0, max_scroll_offset(pages_->require(page), state_.profile));
    state_.last_input.clear();
}

void SimulatedDevice::force_scroll(int offset) {
    state_.scroll_offset = std::clamp(
        offset, 0, max_scroll_offset(pages_->require(state_.current_page), state_.profile));
}

std::vector<GroundTruthEntry> SimulatedDevice::current_ground_truth() const {
    return render_now().ground_truth;
}

int SimulatedDevice::content_len() const {
    return content_length(pages_->require(state_.current_page), state_.profile);
}

int SimulatedDevice::viewport_len() const {
    return pages_->require(state_.current_page).horizontal ? state_.profile.width
                                                           : state_.profile.height;
}

}  // namespace guireplay::farm
