#include "guireplay/serialize.hpp"

#include <fstream>

#include "guireplay/digest.hpp"
#include "guireplay/imaging.hpp"
#include "guireplay/png_io.hpp"

namespace guireplay::serialize {

json bbox_to_json(const Bbox& b) {
    return json{{"top", b.top}, {"left", b.left}, {"bottom", b.bottom}, {"right", b.right}};
}

Bbox bbox_from_json(const json& j) {
    return {j.at("top").get<int>(), j.at("left").get<int>(), j.at("bottom").get<int>(),
            j.at("right").get<int>()};
}

json snapshot_to_json(const profile::GuiSnapshot& s) {
    json widgets = json::array();
    for (size_t i = 0; i < s.size(); ++i) {
        const detect::RawWidget& w = s.widgets[i];
        const profile::WidgetProfile& p = s.profiles[i];
        json wj;
        wj["bbox"] = bbox_to_json(w.bbox);
        wj["kind"] = w.kind == detect::WidgetKind::Text ? "Text" : "NonText";
        wj["is_container"] = w.is_container;
        if (w.text) wj["text"] = *w.text;
        wj["shape"] = json{{"width", p.shape.width},
                           {"height", p.shape.height},
                           {"area", p.shape.area},
                           {"aspect_ratio", p.shape.aspect_ratio}};
        wj["norm_center"] = json::array({p.norm_cx, p.norm_cy});
        wj["embedding"] = p.clip_embedding;
        json nb;
        auto put = [&nb](const char* k, const std::optional<int>& v) {
            if (v) nb[k] = *v;
        };
        put("parent", p.neighbors.parent);
        put("up", p.neighbors.up);
        put("down", p.neighbors.down);
        put("left", p.neighbors.left);
        put("right", p.neighbors.right);
        wj["neighbors"] = nb;
        widgets.push_back(std::move(wj));
    }
    json j;
    j["image_digest"] = s.digest;
    j["image_size"] = json::array({s.image.width, s.image.height});
    j["page_offset"] = s.page_offset;
    if (s.device_tag.known()) {
        j["device"] = json{{"name", s.device_tag.name},
                           {"width", s.device_tag.width},
                           {"height", s.device_tag.height},
                           {"dpi", s.device_tag.dpi},
                           {"photo", s.device_tag.photo}};
    }
    j["widgets"] = widgets;
    return j;
}

profile::GuiSnapshot snapshot_from_json(const json& j, PixelImage image) {
    profile::GuiSnapshot s;
    s.image = std::move(image);
    s.digest = digest::image_digest(s.image);
    if (j.at("image_digest").get<std::string>() != s.digest)
        throw ContractError("snapshot_from_json: image digest mismatch");
    s.page_offset = j.value("page_offset", -1);
    if (j.contains("device")) {
        const json& d = j.at("device");
        s.device_tag = {d.at("name").get<std::string>(), d.at("width").get<int>(),
                        d.at("height").get<int>(), d.at("dpi").get<double>(),
                        d.value("photo", false)};
    }
    for (const json& wj : j.at("widgets")) {
        detect::RawWidget w;
        w.bbox = bbox_from_json(wj.at("bbox"));
        w.kind = wj.at("kind").get<std::string>() == "Text" ? detect::WidgetKind::Text
                                                            : detect::WidgetKind::NonText;
        w.is_container = wj.value("is_container", false);
        if (wj.contains("text")) w.text = wj.at("text").get<std::string>();

        profile::WidgetProfile p;
        p.location = w.bbox;
        const json& sh = wj.at("shape");
        p.shape = {sh.at("width").get<int>(), sh.at("height").get<int>(),
                   sh.at("area").get<long long>(), sh.at("aspect_ratio").get<double>()};
        p.norm_cx = wj.at("norm_center")[0].get<double>();
        p.norm_cy = wj.at("norm_center")[1].get<double>();
        p.clip_embedding = wj.at("embedding").get<FeatureVector>();
        p.text = w.text;
        p.clip = imaging::crop(s.image, w.bbox);
        const json& nb = wj.at("neighbors");
        auto get = [&nb](const char* k) -> std::optional<int> {
            if (nb.contains(k)) return nb.at(k).get<int>();
            return std::nullopt;
        };
        p.neighbors = {get("parent"), get("up"), get("down"), get("left"), get("right")};
        s.widgets.push_back(std::move(w));
        s.profiles.push_back(std::move(p));
    }
    return s;
}

json save_snapshot(const profile::GuiSnapshot& s, const std::string& dir) {
    pngio::write_png(dir + "/" + s.digest + ".png", s.image);
    return snapshot_to_json(s);
}

profile::GuiSnapshot load_snapshot(const json& j, const std::string& dir) {
    std::string digest = j.at("image_digest").get<std::string>();
    PixelImage img = pngio::read_png(dir + "/" + digest + ".png");
    return snapshot_from_json(j, std::move(img));
}

json record_to_json(const replay::ActionRecord& r, const std::string& dir) {
    json j;
    j["type"] = farm::action_name(r.type);
    j["point"] = json::array({r.point.x, r.point.y});
    j["distance"] = r.distance;
    if (!r.text_payload.empty()) j["text"] = r.text_payload;
    if (r.duration_ms) j["duration_ms"] = r.duration_ms;
    j["source_before"] = save_snapshot(r.source_before, dir);
    if (r.source_after) j["source_after"] = save_snapshot(*r.source_after, dir);
    if (r.source_widget) j["source_widget"] = *r.source_widget;
    return j;
}

replay::ActionRecord record_from_json(const json& j, const std::string& dir) {
    replay::ActionRecord r;
    r.type = farm::action_from_name(j.at("type").get<std::string>());
    r.point = {j.at("point")[0].get<int>(), j.at("point")[1].get<int>()};
    r.distance = j.value("distance", 0);
    r.text_payload = j.value("text", std::string());
    r.duration_ms = j.value("duration_ms", 0);
    r.source_before = load_snapshot(j.at("source_before"), dir);
    if (j.contains("source_after")) r.source_after = load_snapshot(j.at("source_after"), dir);
    if (j.contains("source_widget")) r.source_widget = j.at("source_widget").get<int>();
    return r;
}

json detect_config_to_json(const detect::DetectConfig& c) {
    return json{{"grad_threshold", c.grad_threshold},
                {"min_area", c.min_area},
                {"dpi", c.dpi},
                {"rect_coverage", c.rect_coverage},
                {"border_band", c.border_band},
                {"refine_tolerance", c.refine_tolerance}};
}

detect::DetectConfig detect_config_from_json(const json& j) {
    detect::DetectConfig c;
    c.grad_threshold = j.value("grad_threshold", c.grad_threshold);
    c.min_area = j.value("min_area", c.min_area);
    c.dpi = j.value("dpi", c.dpi);
    c.rect_coverage = j.value("rect_coverage", c.rect_coverage);
    c.border_band = j.value("border_band", c.border_band);
    c.refine_tolerance = j.value("refine_tolerance", c.refine_tolerance);
    return c;
}

json match_config_to_json(const match::MatchConfig& c) {
    return json{{"embed_threshold", c.embed_threshold},
                {"shape_rel_tol", c.shape_rel_tol},
                {"aspect_abs_tol", c.aspect_abs_tol},
                {"area_ratio_band", json::array({c.area_ratio_lo, c.area_ratio_hi})},
                {"gui_match_fraction", c.gui_match_fraction},
                {"gui_unchanged_mad_tol", c.gui_unchanged_mad_tol}};
}

match::MatchConfig match_config_from_json(const json& j) {
    match::MatchConfig c;
    c.embed_threshold = j.value("embed_threshold", c.embed_threshold);
    c.shape_rel_tol = j.value("shape_rel_tol", c.shape_rel_tol);
    c.aspect_abs_tol = j.value("aspect_abs_tol", c.aspect_abs_tol);
    if (j.contains("area_ratio_band")) {
        c.area_ratio_lo = j.at("area_ratio_band")[0].get<double>();
        c.area_ratio_hi = j.at("area_ratio_band")[1].get<double>();
    }
    c.gui_match_fraction = j.value("gui_match_fraction", c.gui_match_fraction);
    c.gui_unchanged_mad_tol = j.value("gui_unchanged_mad_tol", c.gui_unchanged_mad_tol);
    return c;
}

EngineConfig load_engine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("config: cannot open " + path);
    json j;
    in >> j;
    EngineConfig c;
    if (j.contains("detect")) c.detect = detect_config_from_json(j.at("detect"));
    if (j.contains("match")) c.match = match_config_from_json(j.at("match"));
    return c;
}

json engine_config_to_json(const EngineConfig& c) {
    return json{{"detect", detect_config_to_json(c.detect)},
                {"match", match_config_to_json(c.match)}};
}

json match_log_to_json(const replay::MatchLogEntry& e) {
    json j;
    j["source_widget"] = e.source_widget;
    j["stage"] = e.stage;
    j["candidates_considered"] = e.candidates_considered;
    if (e.matched_widget)
        j["matched_widget"] = *e.matched_widget;
    else
        j["matched_widget"] = nullptr;
    j["similarity"] = e.similarity;
    return j;
}

}  // namespace guireplay::serialize
