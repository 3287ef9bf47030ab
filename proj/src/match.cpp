#include "guireplay/match.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "guireplay/imaging.hpp"

namespace guireplay::match {

namespace {

constexpr int kUnchangedGridW = 64;
constexpr int kUnchangedGridH = 128;

double center_distance(const profile::WidgetProfile& a, const profile::WidgetProfile& b) {
    double dx = a.norm_cx - b.norm_cx;
    double dy = a.norm_cy - b.norm_cy;
    return dx * dx + dy * dy;
}

bool has_text(const profile::WidgetProfile& p) {
    return p.text.has_value() && !normalize_text(*p.text).empty();
}

bool contains_either(const std::string& a, const std::string& b) {
    return text_contains(a, b) || text_contains(b, a);
}

struct CascadeState {
    std::vector<int> cands;
    MatchStage stage = MatchStage::NoMatch;
};

/// Filters that would empty the candidate set are skipped: they rank, they
/// do not veto a set that already passed the decisive gate.
template <class Pred>
void soft_filter(std::vector<int>& cands, MatchStage stage_if_single, CascadeState& st,
                 Pred&& keep) {
    if (cands.size() <= 1) return;
    std::vector<int> passed;
    for (int c : cands)
        if (keep(c)) passed.push_back(c);
    if (!passed.empty()) cands = std::move(passed);
    if (cands.size() == 1) st.stage = stage_if_single;
}

MatchResult finish_cascade(std::vector<int> cands, int considered, MatchStage stage_if_single,
                           int ws_idx, const profile::GuiSnapshot& src,
                           const profile::GuiSnapshot& tgt, const MatchConfig& cfg) {
    const profile::WidgetProfile& ws = src.profiles[ws_idx];
    CascadeState st;
    st.cands = std::move(cands);
    st.stage = stage_if_single;

    // Shape, then embedding, then the surrounding-widget count.
    soft_filter(st.cands, MatchStage::ShapeFilter, st, [&](int c) {
        return shape_compatible(ws, src, tgt.profiles[c], tgt, cfg);
    });
    soft_filter(st.cands, MatchStage::EmbeddingFilter, st, [&](int c) {
        return imaging::cosine_similarity(ws.clip_embedding, tgt.profiles[c].clip_embedding) >=
               cfg.embed_threshold;
    });
    if (st.cands.size() > 1) {
        int best_score = -1;
        for (int c : st.cands)
            best_score = std::max(best_score, neighbor_score(ws_idx, c, src, tgt, cfg));
        std::vector<int> top;
        for (int c : st.cands)
            if (neighbor_score(ws_idx, c, src, tgt, cfg) == best_score) top.push_back(c);
        st.cands = std::move(top);
        if (st.cands.size() == 1) st.stage = MatchStage::NeighborFilter;
    }
    if (st.cands.size() > 1) {
        int best = st.cands[0];
        double best_d = center_distance(ws, tgt.profiles[best]);
        for (size_t i = 1; i < st.cands.size(); ++i) {
            double d = center_distance(ws, tgt.profiles[st.cands[i]]);
            if (d < best_d) {
                best_d = d;
                best = st.cands[i];
            }
        }
        st.cands = {best};
        st.stage = MatchStage::CenterTieBreak;
    }

    MatchResult res;
    res.matched = st.cands[0];
    res.stage = st.stage;
    res.candidates_considered = considered;
    res.similarity = imaging::cosine_similarity(ws.clip_embedding,
                                                tgt.profiles[*res.matched].clip_embedding);
    return res;
}

}  // namespace

const char* stage_name(MatchStage s) {
    switch (s) {
        case MatchStage::TextContainment: return "TextContainment";
        case MatchStage::LongestContent: return "LongestContent";
        case MatchStage::ShapeFilter: return "ShapeFilter";
        case MatchStage::EmbeddingFilter: return "EmbeddingFilter";
        case MatchStage::NeighborFilter: return "NeighborFilter";
        case MatchStage::CenterTieBreak: return "CenterTieBreak";
        case MatchStage::NoMatch: return "NoMatch";
    }
    return "Unknown";
}

std::string normalize_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // trims leading whitespace
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

bool text_contains(const std::string& a, const std::string& b) {
    std::string na = normalize_text(a);
    std::string nb = normalize_text(b);
    if (na.empty()) return false;
    return nb.find(na) != std::string::npos;
}

bool shape_compatible(const profile::WidgetProfile& ws, const profile::GuiSnapshot& src,
                      const profile::WidgetProfile& wt, const profile::GuiSnapshot& tgt,
                      const MatchConfig& cfg) {
    double sw = static_cast<double>(ws.shape.width) / src.screen_width();
    double sh = static_cast<double>(ws.shape.height) / src.screen_height();
    double tw = static_cast<double>(wt.shape.width) / tgt.screen_width();
    double th = static_cast<double>(wt.shape.height) / tgt.screen_height();

    auto rel_diff = [](double a, double b) { return std::abs(a - b) / std::max(a, b); };
    if (rel_diff(sw, tw) > cfg.shape_rel_tol) return false;
    if (rel_diff(sh, th) > cfg.shape_rel_tol) return false;

    double area_ratio = (sw * sh) / (tw * th);
    if (area_ratio < cfg.area_ratio_lo || area_ratio > cfg.area_ratio_hi) return false;

    return std::abs(ws.shape.aspect_ratio - wt.shape.aspect_ratio) <= cfg.aspect_abs_tol;
}

int neighbor_score(int ws_idx, int wt_idx, const profile::GuiSnapshot& src,
                   const profile::GuiSnapshot& tgt, const MatchConfig& cfg) {
    const profile::NeighborSet& sn = src.profiles[ws_idx].neighbors;
    const profile::NeighborSet& tn = tgt.profiles[wt_idx].neighbors;
    const std::optional<int>* s_slots[5] = {&sn.parent, &sn.up, &sn.down, &sn.left, &sn.right};
    const std::optional<int>* t_slots[5] = {&tn.parent, &tn.up, &tn.down, &tn.left, &tn.right};

    int score = 0;
    for (int k = 0; k < 5; ++k) {
        if (!s_slots[k]->has_value() || !t_slots[k]->has_value()) continue;
        const profile::WidgetProfile& sp = src.profiles[**s_slots[k]];
        const profile::WidgetProfile& tp = tgt.profiles[**t_slots[k]];
        bool matched = false;
        if (has_text(sp) && has_text(tp)) {
            matched = contains_either(*sp.text, *tp.text);
        } else if (src.widgets[**s_slots[k]].kind == detect::WidgetKind::NonText &&
                   tgt.widgets[**t_slots[k]].kind == detect::WidgetKind::NonText) {
            matched = imaging::cosine_similarity(sp.clip_embedding, tp.clip_embedding) >=
                      cfg.embed_threshold;
        }
        if (matched) ++score;
    }
    return score;
}

MatchResult match_text_widget(int ws_idx, const profile::GuiSnapshot& src,
                              const profile::GuiSnapshot& tgt, const MatchConfig& cfg) {
    const profile::WidgetProfile& ws = src.profiles[ws_idx];
    if (!ws.text.has_value())
        throw ContractError("match_text_widget: source widget has no text");
    std::string query = normalize_text(*ws.text);

    MatchResult none;
    none.stage = MatchStage::NoMatch;
    if (query.empty()) return none;

    std::vector<int> cands;
    for (size_t j = 0; j < tgt.size(); ++j) {
        const profile::WidgetProfile& wt = tgt.profiles[j];
        if (!has_text(wt)) continue;
        if (contains_either(*ws.text, *wt.text)) cands.push_back(static_cast<int>(j));
    }
    none.candidates_considered = static_cast<int>(cands.size());
    if (cands.empty()) return none;  // no fallback to other attributes

    const int considered = static_cast<int>(cands.size());
    if (cands.size() == 1)
        return finish_cascade(std::move(cands), considered, MatchStage::TextContainment,
                              ws_idx, src, tgt, cfg);

    std::vector<std::string> contents;
    contents.reserve(cands.size());
    for (int c : cands) contents.push_back(normalize_text(*tgt.profiles[c].text));
    bool all_distinct = true;
    for (size_t i = 0; i < contents.size() && all_distinct; ++i)
        for (size_t j = i + 1; j < contents.size(); ++j)
            if (contents[i] == contents[j]) {
                all_distinct = false;
                break;
            }

    if (all_distinct) {
        // Distinct contents are partial pieces of a broken line: take the
        // longest one; a length tie falls through to the attribute cascade.
        size_t best_len = 0;
        for (const std::string& c : contents) best_len = std::max(best_len, c.size());
        std::vector<int> longest;
        for (size_t i = 0; i < cands.size(); ++i)
            if (contents[i].size() == best_len) longest.push_back(cands[i]);
        return finish_cascade(std::move(longest), considered, MatchStage::LongestContent,
                              ws_idx, src, tgt, cfg);
    }
    return finish_cascade(std::move(cands), considered, MatchStage::TextContainment, ws_idx,
                          src, tgt, cfg);
}

MatchResult match_nontext_widget(int ws_idx, const profile::GuiSnapshot& src,
                                 const profile::GuiSnapshot& tgt, const MatchConfig& cfg) {
    const profile::WidgetProfile& ws = src.profiles[ws_idx];

    std::vector<int> cands;
    for (size_t j = 0; j < tgt.size(); ++j) {
        if (tgt.widgets[j].kind != detect::WidgetKind::NonText) continue;
        double sim =
            imaging::cosine_similarity(ws.clip_embedding, tgt.profiles[j].clip_embedding);
        if (sim >= cfg.embed_threshold) cands.push_back(static_cast<int>(j));
    }
    if (cands.empty()) {
        MatchResult none;
        none.stage = MatchStage::NoMatch;
        return none;
    }
    const int considered = static_cast<int>(cands.size());
    return finish_cascade(std::move(cands), considered, MatchStage::EmbeddingFilter, ws_idx,
                          src, tgt, cfg);
}

MatchResult match_widget(int ws_idx, const profile::GuiSnapshot& src,
                         const profile::GuiSnapshot& tgt, const MatchConfig& cfg) {
    const detect::RawWidget& w = src.widgets[ws_idx];
    if (w.kind == detect::WidgetKind::Text) return match_text_widget(ws_idx, src, tgt, cfg);
    if (w.text.has_value() && !normalize_text(*w.text).empty()) {
        // Container with absorbed text: text content decides when it can.
        MatchResult by_text = match_text_widget(ws_idx, src, tgt, cfg);
        if (by_text.matched) return by_text;
        return match_nontext_widget(ws_idx, src, tgt, cfg);
    }
    return match_nontext_widget(ws_idx, src, tgt, cfg);
}

bool gui_unchanged_same_device(const PixelImage& before, const PixelImage& after,
                               const MatchConfig& cfg) {
    if (before.width != after.width || before.height != after.height)
        throw ContractError("gui_unchanged_same_device: dimension mismatch");
    GrayImage a = imaging::downscale_luma(imaging::to_grayscale(before), kUnchangedGridW,
                                          kUnchangedGridH);
    GrayImage b = imaging::downscale_luma(imaging::to_grayscale(after), kUnchangedGridW,
                                          kUnchangedGridH);
    long long total = 0;
    for (size_t i = 0; i < a.data.size(); ++i)
        total += std::abs(static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]));
    double mad = static_cast<double>(total) / static_cast<double>(a.data.size());
    return mad <= cfg.gui_unchanged_mad_tol * 255.0;
}

GuiMatch match_gui_cross_device(const profile::GuiSnapshot& g_small,
                                const profile::GuiSnapshot& g_large, const MatchConfig& cfg) {
    long long small_area =
        static_cast<long long>(g_small.screen_width()) * g_small.screen_height();
    long long large_area =
        static_cast<long long>(g_large.screen_width()) * g_large.screen_height();
    if (small_area > large_area)
        throw ContractError(
            "match_gui_cross_device: arguments swapped, first snapshot must come from the "
            "smaller screen");

    GuiMatch out;
    if (g_small.size() == 0) {
        out.matched = true;
        out.fraction = 1.0;
        return out;
    }
    int matched = 0;
    for (size_t i = 0; i < g_small.size(); ++i) {
        MatchResult r = match_widget(static_cast<int>(i), g_small, g_large, cfg);
        if (r.matched) ++matched;
        out.per_widget.push_back(std::move(r));
    }
    out.fraction = static_cast<double>(matched) / static_cast<double>(g_small.size());
    out.matched = out.fraction >= cfg.gui_match_fraction;
    return out;
}

Bbox template_match_baseline(const PixelImage& ws_clip, const PixelImage& target_img) {
    if (ws_clip.width > target_img.width || ws_clip.height > target_img.height)
        throw ContractError("template_match_baseline: clip larger than target");
    GrayImage clip = imaging::to_grayscale(ws_clip);
    GrayImage target = imaging::to_grayscale(target_img);
    std::vector<double> scores = imaging::ncc_score_map(target, clip);

    const int pw = target.width - clip.width + 1;
    size_t best = 0;
    for (size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;  // strict: first max wins (top, then left)
    int py = static_cast<int>(best / pw);
    int px = static_cast<int>(best % pw);
    return Bbox{py, px, py + clip.height, px + clip.width};
}

}  // namespace guireplay::match
