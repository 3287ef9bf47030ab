#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guireplay/profile.hpp"
#include "guireplay/types.hpp"

namespace guireplay::match {

struct MatchConfig {
    double embed_threshold = 0.8;       // candidates below 80% similarity are discarded
    double shape_rel_tol = 0.3;         // relative diff of screen-normalized width/height
    double aspect_abs_tol = 0.5;        // absolute aspect-ratio difference
    double area_ratio_lo = 0.5;         // normalized area ratio band
    double area_ratio_hi = 2.0;
    double gui_match_fraction = 1.0;    // widgets of the smaller GUI that must match
    double gui_unchanged_mad_tol = 0.02;
};

enum class MatchStage {
    TextContainment,
    LongestContent,
    ShapeFilter,
    EmbeddingFilter,
    NeighborFilter,
    CenterTieBreak,
    NoMatch,
};

const char* stage_name(MatchStage s);

struct MatchResult {
    std::optional<int> matched;  // index into the target snapshot
    MatchStage stage = MatchStage::NoMatch;
    int candidates_considered = 0;
    double similarity = 0.0;  // cosine vs the matched widget, when one exists
};

/// Case-folded, whitespace runs collapsed, trimmed.
std::string normalize_text(const std::string& s);

/// normalize(a) is a substring of normalize(b). Callers check both directions.
bool text_contains(const std::string& a, const std::string& b);

/// Screen-normalized shape comparison: relative width/height difference within
/// shape_rel_tol, normalized area ratio inside the band, and absolute aspect
/// difference within aspect_abs_tol.
bool shape_compatible(const profile::WidgetProfile& ws, const profile::GuiSnapshot& src,
                      const profile::WidgetProfile& wt, const profile::GuiSnapshot& tgt,
                      const MatchConfig& cfg);

/// Matched surrounding widgets (parent + 4 directions), 0..5.
int neighbor_score(int ws_idx, int wt_idx, const profile::GuiSnapshot& src,
                   const profile::GuiSnapshot& tgt, const MatchConfig& cfg);

/// Text cascade: containment -> longest distinct content -> shape ->
/// embedding -> surrounding widgets -> centre tie-break. No containment
/// candidates means NoMatch with no fallback.
MatchResult match_text_widget(int ws_idx, const profile::GuiSnapshot& src,
                              const profile::GuiSnapshot& tgt, const MatchConfig& cfg);

/// Non-text cascade: embedding gate (>= threshold) -> shape -> surrounding
/// widgets -> centre tie-break.
MatchResult match_nontext_widget(int ws_idx, const profile::GuiSnapshot& src,
                                 const profile::GuiSnapshot& tgt, const MatchConfig& cfg);

/// Kind dispatch. Containers with absorbed text try the text path first and
/// fall back to the clip path; a successful text match wins.
MatchResult match_widget(int ws_idx, const profile::GuiSnapshot& src,
                         const profile::GuiSnapshot& tgt, const MatchConfig& cfg);

/// Same-device GUI comparison via downscaled mean absolute luminance diff.
bool gui_unchanged_same_device(const PixelImage& before, const PixelImage& after,
                               const MatchConfig& cfg);

struct GuiMatch {
    bool matched = false;
    double fraction = 0.0;
    std::vector<MatchResult> per_widget;
};

/// Matches every widget of the smaller-screen snapshot into the larger one.
/// Passing the pair in the wrong size order is a contract error.
GuiMatch match_gui_cross_device(const profile::GuiSnapshot& g_small,
                                const profile::GuiSnapshot& g_large, const MatchConfig& cfg);

/// RoScript-style baseline: normalized cross-correlation sweep at native
/// scale; deterministic topmost-leftmost tie-break.
Bbox template_match_baseline(const PixelImage& ws_clip, const PixelImage& target_img);

}  // namespace guireplay::match
