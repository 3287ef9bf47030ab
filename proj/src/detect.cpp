#include "guireplay/detect.hpp"

#include <algorithm>
#include <cmath>

#include "guireplay/imaging.hpp"

namespace guireplay::detect {

namespace {

constexpr double kDedupeIou = 0.95;

struct Cand {
    std::vector<Point> pixels;
    Bbox pixel_bbox;   // tight bound of the gradient-ring pixels
    Bbox box;          // background-snapped box
    std::vector<int> children;
    int parent = -1;
};

/// Snap a candidate box to the pixels that differ from the local background.
/// The background is the per-channel median of the ring just outside the
/// expanded box; gradient rings sit off the true widget edge by a pixel.
/// Only differing pixels 4-connected to the region itself count, so the
/// search cannot leak onto a second background the expanded box straddles.
Bbox refine_box(const PixelImage& img, const Region& region, int tol) {
    const Bbox& raw = region.bbox;
    Bbox area{std::max(0, raw.top - 2), std::max(0, raw.left - 2),
              std::min(img.height, raw.bottom + 2), std::min(img.width, raw.right + 2)};

    std::vector<std::uint8_t> ch[3];
    auto sample = [&](int x, int y) {
        const std::uint8_t* p = img.at(x, y);
        for (int c = 0; c < 3; ++c) ch[c].push_back(p[c]);
    };
    int bt = std::max(0, area.top - 1), bb = std::min(img.height - 1, area.bottom);
    int bl = std::max(0, area.left - 1), br = std::min(img.width - 1, area.right);
    for (int x = bl; x <= br; ++x) {
        sample(x, bt);
        sample(x, bb);
    }
    for (int y = bt; y <= bb; ++y) {
        sample(bl, y);
        sample(br, y);
    }
    int bg[3];
    for (int c = 0; c < 3; ++c) {
        auto mid = ch[c].begin() + ch[c].size() / 2;
        std::nth_element(ch[c].begin(), mid, ch[c].end());
        bg[c] = *mid;
    }

    const int aw = area.width(), ah = area.height();
    auto differs = [&](int x, int y) {
        const std::uint8_t* p = img.at(x, y);
        return std::max({std::abs(p[0] - bg[0]), std::abs(p[1] - bg[1]),
                         std::abs(p[2] - bg[2])}) > tol;
    };
    std::vector<std::uint8_t> visited(static_cast<size_t>(aw) * ah, 0);
    std::vector<Point> stack;
    auto try_push = [&](int x, int y) {
        if (x < area.left || y < area.top || x >= area.right || y >= area.bottom) return;
        size_t idx = static_cast<size_t>(y - area.top) * aw + (x - area.left);
        if (visited[idx]) return;
        if (!differs(x, y)) return;
        visited[idx] = 1;
        stack.push_back({x, y});
    };
    for (const Point& p : region.pixels) {
        try_push(p.x, p.y);
        try_push(p.x - 1, p.y);
        try_push(p.x + 1, p.y);
        try_push(p.x, p.y - 1);
        try_push(p.x, p.y + 1);
    }

    Bbox tight{area.bottom, area.right, area.top, area.left};  // inverted until a hit
    bool any = false;
    while (!stack.empty()) {
        Point p = stack.back();
        stack.pop_back();
        any = true;
        tight.top = std::min(tight.top, p.y);
        tight.left = std::min(tight.left, p.x);
        tight.bottom = std::max(tight.bottom, p.y + 1);
        tight.right = std::max(tight.right, p.x + 1);
        try_push(p.x - 1, p.y);
        try_push(p.x + 1, p.y);
        try_push(p.x, p.y - 1);
        try_push(p.x, p.y + 1);
    }
    return any ? tight : raw;
}

/// Gradient-ring candidates with refined boxes; near-identical boxes (rings
/// split by noise re-snap to the same extent) are merged, and concentric
/// rings (the two edges of a border stroke or a framed artwork) collapse
/// into the outer one.
std::vector<Cand> candidate_regions(const PixelImage& img, const DetectConfig& cfg) {
    GrayImage gray = imaging::to_grayscale(img);
    BinaryMap bin = imaging::gradient_binarize(gray, cfg.grad_threshold);
    std::vector<Region> regions = imaging::connected_components(bin, cfg.scaled_min_area());

    std::vector<Cand> cands;
    for (Region& r : regions) {
        Bbox refined = refine_box(img, r, cfg.refine_tolerance);
        bool merged = false;
        for (Cand& c : cands) {
            if (bbox_iou(c.box, refined) >= kDedupeIou) {
                c.pixels.insert(c.pixels.end(), r.pixels.begin(), r.pixels.end());
                c.pixel_bbox.top = std::min(c.pixel_bbox.top, r.bbox.top);
                c.pixel_bbox.left = std::min(c.pixel_bbox.left, r.bbox.left);
                c.pixel_bbox.bottom = std::max(c.pixel_bbox.bottom, r.bbox.bottom);
                c.pixel_bbox.right = std::max(c.pixel_bbox.right, r.bbox.right);
                merged = true;
                break;
            }
        }
        if (!merged) cands.push_back({std::move(r.pixels), r.bbox, refined, {}, -1});
    }

    // Concentric collapse: a nested box hugging the outer box on every side
    // is the same visual edge, not a nested widget.
    const int hug = 2 * cfg.border_band;
    std::vector<char> dead(cands.size(), 0);
    std::vector<size_t> order(cands.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return cands[a].box.area() > cands[b].box.area();
    });
    for (size_t oi : order) {
        if (dead[oi]) continue;
        Cand& outer = cands[oi];
        for (size_t j = 0; j < cands.size(); ++j) {
            if (j == oi || dead[j]) continue;
            const Bbox& in = cands[j].box;
            const Bbox& out = outer.box;
            if (!out.contains(in)) continue;
            if (in.top - out.top <= hug && in.left - out.left <= hug &&
                out.bottom - in.bottom <= hug && out.right - in.right <= hug) {
                outer.pixels.insert(outer.pixels.end(), cands[j].pixels.begin(),
                                    cands[j].pixels.end());
                dead[j] = 1;
            }
        }
    }
    std::vector<Cand> alive;
    for (size_t i = 0; i < cands.size(); ++i)
        if (!dead[i]) alive.push_back(std::move(cands[i]));

    // Slivers cut off by the viewport edge are not actionable widgets.
    std::erase_if(alive, [&](const Cand& c) {
        bool touches_v = c.box.top == 0 || c.box.bottom == img.height;
        bool touches_h = c.box.left == 0 || c.box.right == img.width;
        return (touches_v && c.box.height() < 8) || (touches_h && c.box.width() < 8);
    });
    return alive;
}

void link_forest(std::vector<Cand>& cands) {
    for (size_t i = 0; i < cands.size(); ++i) {
        long long best_area = -1;
        int best = -1;
        for (size_t j = 0; j < cands.size(); ++j) {
            if (i == j) continue;
            if (cands[j].box.contains(cands[i].box) && !(cands[j].box == cands[i].box)) {
                long long a = cands[j].box.area();
                if (best < 0 || a < best_area) {
                    best = static_cast<int>(j);
                    best_area = a;
                }
            }
        }
        cands[i].parent = best;
        if (best >= 0) cands[best].children.push_back(static_cast<int>(i));
    }
}

Region to_region(const Cand& c) {
    Region r;
    r.pixels = c.pixels;
    r.bbox = c.pixel_bbox;
    r.area = static_cast<long long>(c.pixels.size());
    return r;
}

bool container_test(const Cand& cand, const std::vector<const Cand*>& inner,
                    const DetectConfig& cfg, int img_w, int img_h) {
    Region r = to_region(cand);
    std::vector<Region> inner_regions;
    inner_regions.reserve(inner.size());
    for (const Cand* c : inner) inner_regions.push_back(to_region(*c));
    return recognize_container_clipped(r, inner_regions, cfg, img_w, img_h);
}

bool widget_order(const RawWidget& a, const RawWidget& b) {
    if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
    if (a.bbox.left != b.bbox.left) return a.bbox.left < b.bbox.left;
    if (a.bbox.bottom != b.bbox.bottom) return a.bbox.bottom < b.bbox.bottom;
    if (a.bbox.right != b.bbox.right) return a.bbox.right < b.bbox.right;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
}

}  // namespace

long long DetectConfig::scaled_min_area() const {
    double s = dpi / 160.0;
    return std::max(1LL, static_cast<long long>(std::llround(min_area * s * s)));
}

bool recognize_container_clipped(const Region& candidate, const std::vector<Region>& inner,
                                 const DetectConfig& cfg, int img_w, int img_h) {
    const Bbox& b = candidate.bbox;
    const int w = b.width(), h = b.height();
    if (w < 8 || h < 8) return false;

    // (1) Rectangularity: region pixels must trace the bbox perimeter.
    // Perimeter edges clipped by the image border count as covered.
    std::vector<std::uint8_t> top_hit(w, 0), bot_hit(w, 0), left_hit(h, 0), right_hit(h, 0);
    for (const Point& p : candidate.pixels) {
        if (p.y == b.top) top_hit[p.x - b.left] = 1;
        if (p.y == b.bottom - 1) bot_hit[p.x - b.left] = 1;
        if (p.x == b.left) left_hit[p.y - b.top] = 1;
        if (p.x == b.right - 1) right_hit[p.y - b.top] = 1;
    }
    bool top_clip = img_h > 0 && b.top == 0;
    bool bot_clip = img_h > 0 && b.bottom == img_h;
    bool left_clip = img_w > 0 && b.left == 0;
    bool right_clip = img_w > 0 && b.right == img_w;

    long long covered = 0, total = 0;
    auto tally = [&](const std::vector<std::uint8_t>& hits, bool clipped) {
        for (std::uint8_t v : hits) {
            ++total;
            if (v || clipped) ++covered;
        }
    };
    tally(top_hit, top_clip);
    tally(bot_hit, bot_clip);
    tally(left_hit, left_clip);
    tally(right_hit, right_clip);
    if (static_cast<double>(covered) < cfg.rect_coverage * static_cast<double>(total))
        return false;

    // (2) No inner object may reach the candidate's border band.
    const int band = cfg.border_band;
    for (const Region& in : inner) {
        for (const Point& p : in.pixels) {
            if (p.x < b.left + band || p.x >= b.right - band || p.y < b.top + band ||
                p.y >= b.bottom - band)
                return false;
        }
    }
    return true;
}

bool recognize_container(const Region& candidate, const std::vector<Region>& inner,
                         const DetectConfig& cfg) {
    return recognize_container_clipped(candidate, inner, cfg, -1, -1);
}

std::vector<RawWidget> detect_nontext(const PixelImage& img, const DetectConfig& cfg) {
    if (img.empty()) throw ContractError("detect_nontext: empty image");
    std::vector<Cand> cands = candidate_regions(img, cfg);
    link_forest(cands);

    std::vector<RawWidget> out;
    // Containers keep their nested widgets; anything nested in a plain widget
    // is part of that widget's artwork and is dropped.
    auto visit = [&](auto&& self, int idx) -> void {
        const Cand& c = cands[idx];
        std::vector<const Cand*> inner;
        // All descendants participate in the border-touch test.
        std::vector<int> stack(c.children);
        while (!stack.empty()) {
            int k = stack.back();
            stack.pop_back();
            inner.push_back(&cands[k]);
            stack.insert(stack.end(), cands[k].children.begin(), cands[k].children.end());
        }
        bool is_cont = container_test(c, inner, cfg, img.width, img.height);
        out.push_back({c.box, WidgetKind::NonText, is_cont, std::nullopt});
        if (is_cont)
            for (int k : c.children) self(self, k);
    };
    for (size_t i = 0; i < cands.size(); ++i)
        if (cands[i].parent < 0) visit(visit, static_cast<int>(i));

    std::sort(out.begin(), out.end(), widget_order);
    return out;
}

std::vector<RawWidget> merge_text_nontext(const std::vector<TextLine>& texts,
                                          const std::vector<RawWidget>& nontexts) {
    std::vector<RawWidget> out;
    for (const RawWidget& w : nontexts) {
        std::vector<const TextLine*> hit;
        for (const TextLine& t : texts)
            if (w.bbox.intersects(t.bbox)) hit.push_back(&t);
        if (hit.empty()) {
            out.push_back(w);
            continue;
        }
        if (w.is_container) {
            bool all_inside = std::all_of(hit.begin(), hit.end(), [&](const TextLine* t) {
                return w.bbox.strictly_contains(t->bbox);
            });
            if (all_inside) {
                std::sort(hit.begin(), hit.end(), [](const TextLine* a, const TextLine* b) {
                    if (a->bbox.top != b->bbox.top) return a->bbox.top < b->bbox.top;
                    return a->bbox.left < b->bbox.left;
                });
                std::string joined;
                for (const TextLine* t : hit) {
                    if (!joined.empty()) joined += ' ';
                    joined += t->content;
                }
                RawWidget kept = w;
                kept.text = joined;
                out.push_back(std::move(kept));
            }
            // Container partially overlapping a text line: cross-check fails,
            // discard like any other non-text widget.
        }
    }
    for (const TextLine& t : texts)
        out.push_back({t.bbox, WidgetKind::Text, false, t.content});

    std::sort(out.begin(), out.end(), widget_order);
    return out;
}

ScreenRegion extract_screen_region(const PixelImage& photo, const DetectConfig& cfg) {
    std::vector<Cand> cands = candidate_regions(photo, cfg);

    std::vector<int> matches;
    for (size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].box.height() * 2 <= photo.height) continue;
        int inside = 0;
        bool contained = false;
        for (size_t j = 0; j < cands.size(); ++j) {
            if (i == j) continue;
            if (cands[i].box.strictly_contains(cands[j].box)) ++inside;
            if (cands[j].box.strictly_contains(cands[i].box)) contained = true;
        }
        if (inside >= 2 && !contained) matches.push_back(static_cast<int>(i));
    }
    if (matches.empty()) throw ScreenNotFound("extract_screen_region: no screen candidate");
    if (matches.size() > 1)
        throw AmbiguousScreen("extract_screen_region: multiple screen candidates");
    const Bbox& b = cands[matches[0]].box;
    return {b, imaging::crop(photo, b)};
}

std::vector<RawWidget> detect_widgets(const PixelImage& img, const TextProvider& provider,
                                      const DetectConfig& cfg) {
    std::vector<TextLine> texts = provider.lines(img);
    // Defensive clamp: line boxes must stay inside the image; empty contents
    // are not text widgets.
    std::vector<TextLine> valid;
    for (TextLine t : texts) {
        t.bbox.top = std::clamp(t.bbox.top, 0, img.height);
        t.bbox.bottom = std::clamp(t.bbox.bottom, 0, img.height);
        t.bbox.left = std::clamp(t.bbox.left, 0, img.width);
        t.bbox.right = std::clamp(t.bbox.right, 0, img.width);
        if (!t.bbox.valid()) continue;
        std::string trimmed = t.content;
        while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
        size_t start = trimmed.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        valid.push_back(std::move(t));
    }

    std::vector<RawWidget> merged = merge_text_nontext(valid, detect_nontext(img, cfg));

    // A container must actually contain another surviving widget.
    for (RawWidget& w : merged) {
        if (!w.is_container) continue;
        bool has_child = std::any_of(merged.begin(), merged.end(), [&](const RawWidget& o) {
            return &o != &w && w.bbox.strictly_contains(o.bbox);
        });
        if (!has_child) w.is_container = false;
    }
    return merged;
}

}  // namespace guireplay::detect
