#pragma once

// Exhaustive brute-force evaluator for the widget-matching rules, kept
// independent of the library's cascade code: every attribute is recomputed
// here with local helpers and the selection runs as one lexicographic pass
// over all target widgets.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/match.hpp"
#include "guireplay/profile.hpp"

namespace oracle {

using guireplay::Bbox;
using guireplay::FeatureVector;
using guireplay::detect::WidgetKind;
using guireplay::match::MatchConfig;
using guireplay::profile::GuiSnapshot;

inline std::string norm(const std::string& s) {
    std::string out;
    bool space = true;
    for (char raw : s) {
        unsigned char c = static_cast<unsigned char>(raw);
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (ws) {
            if (!space) out += ' ';
            space = true;
        } else {
            out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
            space = false;
        }
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline bool substr_either(const std::string& a, const std::string& b) {
    std::string na = norm(a), nb = norm(b);
    if (na.empty() || nb.empty()) return false;
    return nb.find(na) != std::string::npos || na.find(nb) != std::string::npos;
}

inline double cosine(const FeatureVector& a, const FeatureVector& b) {
    double d = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        d += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0 || nb <= 0) return 0;
    return d / std::sqrt(na) / std::sqrt(nb);
}

inline bool shape_ok(const GuiSnapshot& src, int i, const GuiSnapshot& tgt, int j,
                     const MatchConfig& cfg) {
    auto nw = [](const GuiSnapshot& s, int k) {
        return double(s.profiles[k].shape.width) / s.screen_width();
    };
    auto nh = [](const GuiSnapshot& s, int k) {
        return double(s.profiles[k].shape.height) / s.screen_height();
    };
    double sw = nw(src, i), tw = nw(tgt, j), sh = nh(src, i), th = nh(tgt, j);
    if (std::abs(sw - tw) / std::max(sw, tw) > cfg.shape_rel_tol) return false;
    if (std::abs(sh - th) / std::max(sh, th) > cfg.shape_rel_tol) return false;
    double ratio = (sw * sh) / (tw * th);
    if (ratio < cfg.area_ratio_lo || ratio > cfg.area_ratio_hi) return false;
    double sa = src.profiles[i].shape.aspect_ratio, ta = tgt.profiles[j].shape.aspect_ratio;
    return std::abs(sa - ta) <= cfg.aspect_abs_tol;
}

inline bool slot_matched(const GuiSnapshot& src, std::optional<int> si, const GuiSnapshot& tgt,
                         std::optional<int> ti, const MatchConfig& cfg) {
    if (!si || !ti) return false;
    const auto& sp = src.profiles[*si];
    const auto& tp = tgt.profiles[*ti];
    bool s_text = sp.text && !norm(*sp.text).empty();
    bool t_text = tp.text && !norm(*tp.text).empty();
    if (s_text && t_text) return substr_either(*sp.text, *tp.text);
    if (src.widgets[*si].kind == WidgetKind::NonText &&
        tgt.widgets[*ti].kind == WidgetKind::NonText)
        return cosine(sp.clip_embedding, tp.clip_embedding) >= cfg.embed_threshold;
    return false;
}

inline int neighbors_matched(const GuiSnapshot& src, int i, const GuiSnapshot& tgt, int j,
                             const MatchConfig& cfg) {
    const auto& a = src.profiles[i].neighbors;
    const auto& b = tgt.profiles[j].neighbors;
    int n = 0;
    n += slot_matched(src, a.parent, tgt, b.parent, cfg);
    n += slot_matched(src, a.up, tgt, b.up, cfg);
    n += slot_matched(src, a.down, tgt, b.down, cfg);
    n += slot_matched(src, a.left, tgt, b.left, cfg);
    n += slot_matched(src, a.right, tgt, b.right, cfg);
    return n;
}

inline double center_dist2(const GuiSnapshot& src, int i, const GuiSnapshot& tgt, int j) {
    double dx = src.profiles[i].norm_cx - tgt.profiles[j].norm_cx;
    double dy = src.profiles[i].norm_cy - tgt.profiles[j].norm_cy;
    return dx * dx + dy * dy;
}

/// Narrows candidates exactly like the cascade's ranked rules, evaluated
/// exhaustively. A filter that would empty the set is skipped; each filter
/// applies only while more than one candidate remains.
inline std::optional<int> pick(std::vector<int> cands, const GuiSnapshot& src, int i,
                               const GuiSnapshot& tgt, const MatchConfig& cfg) {
    if (cands.empty()) return std::nullopt;
    if (cands.size() > 1) {
        std::vector<int> pass;
        for (int c : cands)
            if (shape_ok(src, i, tgt, c, cfg)) pass.push_back(c);
        if (!pass.empty()) cands = pass;
    }
    if (cands.size() > 1) {
        std::vector<int> pass;
        for (int c : cands)
            if (cosine(src.profiles[i].clip_embedding, tgt.profiles[c].clip_embedding) >=
                cfg.embed_threshold)
                pass.push_back(c);
        if (!pass.empty()) cands = pass;
    }
    if (cands.size() > 1) {
        int best = -1;
        for (int c : cands) best = std::max(best, neighbors_matched(src, i, tgt, c, cfg));
        std::vector<int> pass;
        for (int c : cands)
            if (neighbors_matched(src, i, tgt, c, cfg) == best) pass.push_back(c);
        cands = pass;
    }
    if (cands.size() > 1) {
        int best = cands[0];
        for (int c : cands)
            if (center_dist2(src, i, tgt, c) < center_dist2(src, i, tgt, best)) best = c;
        return best;
    }
    return cands[0];
}

inline std::optional<int> match_text(int i, const GuiSnapshot& src, const GuiSnapshot& tgt,
                                     const MatchConfig& cfg) {
    const auto& ws = src.profiles[i];
    if (!ws.text || norm(*ws.text).empty()) return std::nullopt;
    std::vector<int> cands;
    for (size_t j = 0; j < tgt.size(); ++j) {
        const auto& wt = tgt.profiles[j];
        if (!wt.text || norm(*wt.text).empty()) continue;
        if (substr_either(*ws.text, *wt.text)) cands.push_back(static_cast<int>(j));
    }
    if (cands.empty()) return std::nullopt;  // no fallback, by rule
    if (cands.size() == 1) return cands[0];

    bool duplicate = false;
    for (size_t a = 0; a < cands.size() && !duplicate; ++a)
        for (size_t b = a + 1; b < cands.size(); ++b)
            if (norm(*tgt.profiles[cands[a]].text) == norm(*tgt.profiles[cands[b]].text)) {
                duplicate = true;
                break;
            }
    if (!duplicate) {
        size_t longest = 0;
        for (int c : cands) longest = std::max(longest, norm(*tgt.profiles[c].text).size());
        std::vector<int> keep;
        for (int c : cands)
            if (norm(*tgt.profiles[c].text).size() == longest) keep.push_back(c);
        return pick(keep, src, i, tgt, cfg);
    }
    return pick(cands, src, i, tgt, cfg);
}

inline std::optional<int> match_nontext(int i, const GuiSnapshot& src, const GuiSnapshot& tgt,
                                        const MatchConfig& cfg) {
    std::vector<int> cands;
    for (size_t j = 0; j < tgt.size(); ++j) {
        if (tgt.widgets[j].kind != WidgetKind::NonText) continue;
        if (cosine(src.profiles[i].clip_embedding, tgt.profiles[j].clip_embedding) >=
            cfg.embed_threshold)
            cands.push_back(static_cast<int>(j));
    }
    return pick(cands, src, i, tgt, cfg);
}

inline std::optional<int> match_widget(int i, const GuiSnapshot& src, const GuiSnapshot& tgt,
                                       const MatchConfig& cfg) {
    if (src.widgets[i].kind == WidgetKind::Text) return match_text(i, src, tgt, cfg);
    if (src.widgets[i].text && !norm(*src.widgets[i].text).empty()) {
        auto by_text = match_text(i, src, tgt, cfg);
        if (by_text) return by_text;
    }
    return match_nontext(i, src, tgt, cfg);
}

}  // namespace oracle
