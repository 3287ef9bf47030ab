#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/types.hpp"

namespace guireplay::farm {

enum class ActionType { Click, LongPress, Input, SwipeH, ScrollV };

const char* action_name(ActionType t);
ActionType action_from_name(const std::string& s);

/// True for actions bound to a widget (click, long press, text input).
bool widget_dependent(ActionType t);

enum class WidgetType { Label, Button, Icon, ImageBox, Container, GridItem };

const char* widget_type_name(WidgetType t);
WidgetType widget_type_from_name(const std::string& s);

struct AbstractWidget {
    std::string id;
    WidgetType kind = WidgetType::Label;
    std::string text;                 // Label, Button, GridItem caption
    int min_width_dp = 0;             // grid cell / button / strip card width hint
    std::uint64_t glyph_seed = 0;     // Icon, ImageBox, GridItem artwork
    bool volatile_region = false;     // ImageBox: repaints per render when enabled
    std::string style;                // Container: "card" | "bar" | "plain"
    std::string layout;               // Container: "column" | "grid"
    bool nav = false;                 // Container placed per skin (top vs bottom)
    std::vector<AbstractWidget> children;
};

struct Transition {
    std::string widget_id;
    ActionType action = ActionType::Click;
    std::string to_page;
};

struct AbstractPage {
    std::string id;
    bool horizontal = false;  // scroll axis; vertical by default
    std::vector<AbstractWidget> widgets;
    std::vector<Transition> transitions;

    std::optional<std::string> transition_target(const std::string& widget_id,
                                                 ActionType action) const;
};

struct PageSet {
    std::map<std::string, AbstractPage> pages;

    const AbstractPage& require(const std::string& id) const;
    bool has(const std::string& id) const { return pages.count(id) > 0; }
};

/// Versioned JSON page documents.
PageSet load_pages(const std::string& path);
PageSet parse_pages(const std::string& json_text);
std::string pages_to_json(const PageSet& set);
void save_pages(const PageSet& set, const std::string& path);

/// Procedural corpus pages: seeded mix of list/grid/form/article/gallery
/// families with detail pages wired through click transitions.
PageSet generate_pages(std::uint64_t seed, int count);

}  // namespace guireplay::farm
