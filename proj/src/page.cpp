#include "guireplay/page.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "guireplay/digest.hpp"

namespace guireplay::farm {

using nlohmann::json;

const char* action_name(ActionType t) {
    switch (t) {
        case ActionType::Click: return "Click";
        case ActionType::LongPress: return "LongPress";
        case ActionType::Input: return "Input";
        case ActionType::SwipeH: return "SwipeH";
        case ActionType::ScrollV: return "ScrollV";
    }
    return "Click";
}

ActionType action_from_name(const std::string& s) {
    if (s == "Click") return ActionType::Click;
    if (s == "LongPress") return ActionType::LongPress;
    if (s == "Input") return ActionType::Input;
    if (s == "SwipeH") return ActionType::SwipeH;
    if (s == "ScrollV") return ActionType::ScrollV;
    throw ConfigError("unknown action type: " + s);
}

bool widget_dependent(ActionType t) {
    return t == ActionType::Click || t == ActionType::LongPress || t == ActionType::Input;
}

const char* widget_type_name(WidgetType t) {
    switch (t) {
        case WidgetType::Label: return "Label";
        case WidgetType::Button: return "Button";
        case WidgetType::Icon: return "Icon";
        case WidgetType::ImageBox: return "ImageBox";
        case WidgetType::Container: return "Container";
        case WidgetType::GridItem: return "GridItem";
    }
    return "Label";
}

WidgetType widget_type_from_name(const std::string& s) {
    if (s == "Label") return WidgetType::Label;
    if (s == "Button") return WidgetType::Button;
    if (s == "Icon") return WidgetType::Icon;
    if (s == "ImageBox") return WidgetType::ImageBox;
    if (s == "Container") return WidgetType::Container;
    if (s == "GridItem") return WidgetType::GridItem;
    throw ConfigError("unknown widget kind: " + s);
}

std::optional<std::string> AbstractPage::transition_target(const std::string& widget_id,
                                                           ActionType action) const {
    for (const Transition& t : transitions)
        if (t.widget_id == widget_id && t.action == action) return t.to_page;
    return std::nullopt;
}

const AbstractPage& PageSet::require(const std::string& id) const {
    auto it = pages.find(id);
    if (it == pages.end()) throw PageNotFound("unknown page: " + id);
    return it->second;
}

// ---------------------------------------------------------------------------
// JSON schema (version 1)
// ---------------------------------------------------------------------------

namespace {

json widget_to_json(const AbstractWidget& w) {
    json j;
    j["id"] = w.id;
    j["kind"] = widget_type_name(w.kind);
    if (!w.text.empty()) j["text"] = w.text;
    if (w.min_width_dp) j["min_width_dp"] = w.min_width_dp;
    if (w.glyph_seed) j["glyph_seed"] = w.glyph_seed;
    if (w.volatile_region) j["volatile"] = true;
    if (!w.style.empty()) j["style"] = w.style;
    if (!w.layout.empty()) j["layout"] = w.layout;
    if (w.nav) j["nav"] = true;
    if (!w.children.empty()) {
        json arr = json::array();
        for (const auto& c : w.children) arr.push_back(widget_to_json(c));
        j["children"] = arr;
    }
    return j;
}

AbstractWidget widget_from_json(const json& j) {
    AbstractWidget w;
    w.id = j.at("id").get<std::string>();
    w.kind = widget_type_from_name(j.at("kind").get<std::string>());
    w.text = j.value("text", std::string());
    w.min_width_dp = j.value("min_width_dp", 0);
    w.glyph_seed = j.value("glyph_seed", std::uint64_t{0});
    w.volatile_region = j.value("volatile", false);
    w.style = j.value("style", std::string());
    w.layout = j.value("layout", std::string());
    w.nav = j.value("nav", false);
    if (j.contains("children"))
        for (const auto& c : j.at("children")) w.children.push_back(widget_from_json(c));
    if ((w.kind == WidgetType::Label || w.kind == WidgetType::Button) && w.text.empty())
        throw ConfigError("page widget " + w.id + ": Label/Button requires text");
    return w;
}

void collect_ids(const AbstractWidget& w, std::vector<std::string>& ids) {
    ids.push_back(w.id);
    for (const auto& c : w.children) collect_ids(c, ids);
}

}  // namespace

PageSet parse_pages(const std::string& json_text) {
    json doc = json::parse(json_text);
    if (doc.value("version", 0) != 1) throw ConfigError("page file: unsupported version");
    PageSet set;
    for (const auto& pj : doc.at("pages")) {
        AbstractPage p;
        p.id = pj.at("id").get<std::string>();
        p.horizontal = pj.value("scroll_axis", std::string("vertical")) == "horizontal";
        for (const auto& wj : pj.at("widgets")) p.widgets.push_back(widget_from_json(wj));
        if (pj.contains("transitions")) {
            for (const auto& tj : pj.at("transitions")) {
                Transition t;
                t.widget_id = tj.at("widget").get<std::string>();
                t.action = action_from_name(tj.at("action").get<std::string>());
                t.to_page = tj.at("to").get<std::string>();
                p.transitions.push_back(std::move(t));
            }
        }
        if (set.pages.count(p.id)) throw ConfigError("duplicate page id: " + p.id);
        set.pages[p.id] = std::move(p);
    }
    // Referential checks: unique widget ids per page, transitions resolve.
    for (const auto& [id, p] : set.pages) {
        std::vector<std::string> ids;
        for (const auto& w : p.widgets) collect_ids(w, ids);
        auto sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ConfigError("page " + id + ": duplicate widget ids");
        for (const Transition& t : p.transitions) {
            if (std::find(ids.begin(), ids.end(), t.widget_id) == ids.end())
                throw ConfigError("page " + id + ": transition from unknown widget " +
                                  t.widget_id);
            if (!set.pages.count(t.to_page))
                throw ConfigError("page " + id + ": transition to unknown page " + t.to_page);
        }
    }
    return set;
}

PageSet load_pages(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw IoError("load_pages: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_pages(ss.str());
}

std::string pages_to_json(const PageSet& set) {
    json doc;
    doc["version"] = 1;
    json pages = json::array();
    for (const auto& [id, p] : set.pages) {
        json pj;
        pj["id"] = p.id;
        pj["scroll_axis"] = p.horizontal ? "horizontal" : "vertical";
        json ws = json::array();
        for (const auto& w : p.widgets) ws.push_back(widget_to_json(w));
        pj["widgets"] = ws;
        json ts = json::array();
        for (const auto& t : p.transitions)
            ts.push_back(json{{"widget", t.widget_id},
                              {"action", action_name(t.action)},
                              {"to", t.to_page}});
        pj["transitions"] = ts;
        pages.push_back(pj);
    }
    doc["pages"] = pages;
    return doc.dump(2) + "\n";
}

void save_pages(const PageSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out.good()) throw IoError("save_pages: cannot write " + path);
    out << pages_to_json(set);
}

// ---------------------------------------------------------------------------
// Procedural corpus pages
// ---------------------------------------------------------------------------

namespace {

const char* kWords[] = {"ACCOUNT", "ALBUM",   "ARCHIVE", "BALANCE", "BOOKING", "CAMERA",
                        "CHANNEL", "CONTACT", "COURSE",  "DETAILS", "EXPLORE", "FILTER",
                        "FLIGHTS", "GALLERY", "HISTORY", "INVOICE", "LIBRARY", "MARKET",
                        "MESSAGE", "NETWORK", "OPTIONS", "PAYMENT", "PLAYLIST", "PROFILE",
                        "RECIPES", "REPORTS", "SEARCH",  "STATION", "STORAGE", "STREAM",
                        "TICKETS", "UPDATES", "WALLET",  "WEATHER", "JOURNAL", "SIGNAL"};

std::string pick_word(std::mt19937_64& rng) {
    return kWords[rng() % (sizeof(kWords) / sizeof(kWords[0]))];
}

std::string sentence(std::mt19937_64& rng, int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
        if (i) s += ' ';
        s += pick_word(rng);
    }
    return s;
}

AbstractWidget make_bar(const std::string& page_id, const std::string& title,
                        std::uint64_t seed) {
    AbstractWidget bar;
    bar.id = page_id + "_bar";
    bar.kind = WidgetType::Container;
    bar.style = "bar";
    bar.nav = true;
    AbstractWidget title_w;
    title_w.id = page_id + "_title";
    title_w.kind = WidgetType::Label;
    title_w.text = title;
    bar.children.push_back(title_w);
    AbstractWidget act;
    act.id = page_id + "_baricon";
    act.kind = WidgetType::Icon;
    act.glyph_seed = seed;
    bar.children.push_back(act);
    return bar;
}

}  // namespace

PageSet generate_pages(std::uint64_t seed, int count) {
    PageSet set;
    for (int pi = 0; pi < count; ++pi) {
        std::mt19937_64 rng(digest::mix_seed(seed, "page", static_cast<std::uint64_t>(pi)));
        std::string pid = "gen" + std::to_string(pi);
        AbstractPage p;
        p.id = pid;
        int family = pi % 5;

        p.widgets.push_back(make_bar(pid, sentence(rng, 1) + " " + std::to_string(pi), rng()));

        auto label = [&](const std::string& id, int words) {
            AbstractWidget w;
            w.id = id;
            w.kind = WidgetType::Label;
            w.text = sentence(rng, words);
            return w;
        };
        auto icon = [&](const std::string& id) {
            AbstractWidget w;
            w.id = id;
            w.kind = WidgetType::Icon;
            w.glyph_seed = rng();
            return w;
        };
        auto button = [&](const std::string& id) {
            AbstractWidget w;
            w.id = id;
            w.kind = WidgetType::Button;
            w.text = pick_word(rng);
            w.min_width_dp = 72 + static_cast<int>(rng() % 4) * 12;
            return w;
        };
        auto imagebox = [&](const std::string& id) {
            AbstractWidget w;
            w.id = id;
            w.kind = WidgetType::ImageBox;
            w.glyph_seed = rng();
            return w;
        };

        switch (family) {
            case 0: {  // list of cards: icon + two labels + button
                int rows = 4 + static_cast<int>(rng() % 3);
                for (int r = 0; r < rows; ++r) {
                    AbstractWidget card;
                    card.id = pid + "_card" + std::to_string(r);
                    card.kind = WidgetType::Container;
                    card.style = "card";
                    card.children.push_back(icon(pid + "_ic" + std::to_string(r)));
                    card.children.push_back(label(pid + "_t" + std::to_string(r), 2));
                    card.children.push_back(
                        label(pid + "_s" + std::to_string(r), 3 + static_cast<int>(rng() % 3)));
                    if (r % 2 == 0)
                        card.children.push_back(button(pid + "_b" + std::to_string(r)));
                    p.widgets.push_back(std::move(card));
                }
                break;
            }
            case 1: {  // launcher grid
                AbstractWidget grid;
                grid.id = pid + "_grid";
                grid.kind = WidgetType::Container;
                grid.style = "plain";
                grid.layout = "grid";
                grid.min_width_dp = 88 + static_cast<int>(rng() % 3) * 8;
                int items = 8 + static_cast<int>(rng() % 8);
                for (int g = 0; g < items; ++g) {
                    AbstractWidget it;
                    it.id = pid + "_g" + std::to_string(g);
                    it.kind = WidgetType::GridItem;
                    it.text = pick_word(rng);
                    it.glyph_seed = rng();
                    grid.children.push_back(std::move(it));
                }
                p.widgets.push_back(std::move(grid));
                p.widgets.push_back(label(pid + "_foot", 4));
                break;
            }
            case 2: {  // article: headline, image, paragraphs, actions
                p.widgets.push_back(label(pid + "_head", 3));
                p.widgets.push_back(imagebox(pid + "_img0"));
                for (int r = 0; r < 3 + static_cast<int>(rng() % 3); ++r)
                    p.widgets.push_back(label(pid + "_p" + std::to_string(r),
                                              6 + static_cast<int>(rng() % 5)));
                AbstractWidget actions;
                actions.id = pid + "_actions";
                actions.kind = WidgetType::Container;
                actions.style = "card";
                actions.children.push_back(button(pid + "_like"));
                actions.children.push_back(button(pid + "_share"));
                p.widgets.push_back(std::move(actions));
                break;
            }
            case 3: {  // form: field-like cards with buttons
                for (int r = 0; r < 3 + static_cast<int>(rng() % 2); ++r) {
                    AbstractWidget card;
                    card.id = pid + "_f" + std::to_string(r);
                    card.kind = WidgetType::Container;
                    card.style = "card";
                    card.children.push_back(label(pid + "_fl" + std::to_string(r), 2));
                    card.children.push_back(button(pid + "_fb" + std::to_string(r)));
                    p.widgets.push_back(std::move(card));
                }
                AbstractWidget grid;
                grid.id = pid + "_quick";
                grid.kind = WidgetType::Container;
                grid.style = "plain";
                grid.layout = "grid";
                grid.min_width_dp = 96;
                for (int g = 0; g < 6; ++g) {
                    AbstractWidget it;
                    it.id = pid + "_q" + std::to_string(g);
                    it.kind = WidgetType::GridItem;
                    it.text = pick_word(rng);
                    it.glyph_seed = rng();
                    grid.children.push_back(std::move(it));
                }
                p.widgets.push_back(std::move(grid));
                break;
            }
            case 4: {  // gallery: image boxes with captions
                for (int r = 0; r < 3 + static_cast<int>(rng() % 3); ++r) {
                    p.widgets.push_back(imagebox(pid + "_ib" + std::to_string(r)));
                    p.widgets.push_back(label(pid + "_cap" + std::to_string(r), 3));
                }
                break;
            }
        }
        set.pages[p.id] = std::move(p);
    }
    return set;
}

}  // namespace guireplay::farm
