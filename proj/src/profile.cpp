#include "guireplay/profile.hpp"

#include <algorithm>
#include <limits>

#include "guireplay/digest.hpp"
#include "guireplay/imaging.hpp"

namespace guireplay::profile {

ShapeTuple compute_shape(const Bbox& box) {
    if (!box.valid()) throw ContractError("compute_shape: invalid box");
    ShapeTuple s;
    s.width = box.width();
    s.height = box.height();
    s.area = box.area();
    s.aspect_ratio = static_cast<double>(s.width) / static_cast<double>(s.height);
    return s;
}

std::optional<int> find_parent(int idx, const std::vector<detect::RawWidget>& widgets) {
    const Bbox& me = widgets[idx].bbox;
    std::optional<int> best;
    long long best_area = std::numeric_limits<long long>::max();
    for (size_t j = 0; j < widgets.size(); ++j) {
        if (static_cast<int>(j) == idx || !widgets[j].is_container) continue;
        if (!widgets[j].bbox.strictly_contains(me)) continue;
        long long a = widgets[j].bbox.area();
        if (a < best_area) {
            best_area = a;
            best = static_cast<int>(j);
        }
    }
    return best;
}

namespace {

std::vector<int> ancestor_chain(int idx, const std::vector<detect::RawWidget>& widgets) {
    std::vector<int> chain;
    int cur = idx;
    for (;;) {
        auto p = find_parent(cur, widgets);
        if (!p) break;
        chain.push_back(*p);
        cur = *p;
        if (chain.size() > widgets.size()) break;  // defensive, parent relation is acyclic
    }
    return chain;
}

inline int overlap(int a0, int a1, int b0, int b1) {
    return std::min(a1, b1) - std::max(a0, b0);
}

}  // namespace

NeighborSet find_neighbors(int idx, const std::vector<detect::RawWidget>& widgets) {
    const Bbox& me = widgets[idx].bbox;
    std::vector<int> excluded = ancestor_chain(idx, widgets);
    auto is_excluded = [&](int j) {
        return j == idx || std::find(excluded.begin(), excluded.end(), j) != excluded.end();
    };

    NeighborSet n;
    int best_dist[4] = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                        std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
    std::optional<int>* slots[4] = {&n.up, &n.down, &n.left, &n.right};

    for (size_t j = 0; j < widgets.size(); ++j) {
        if (is_excluded(static_cast<int>(j))) continue;
        const Bbox& o = widgets[j].bbox;
        int h_ov = overlap(me.left, me.right, o.left, o.right);
        int v_ov = overlap(me.top, me.bottom, o.top, o.bottom);
        int dist[4] = {
            h_ov >= 1 ? me.top - o.bottom : -1,     // up
            h_ov >= 1 ? o.top - me.bottom : -1,     // down
            v_ov >= 1 ? me.left - o.right : -1,     // left
            v_ov >= 1 ? o.left - me.right : -1,     // right
        };
        for (int d = 0; d < 4; ++d) {
            if (dist[d] < 0) continue;
            if (dist[d] < best_dist[d]) {
                best_dist[d] = dist[d];
                *slots[d] = static_cast<int>(j);
            }
        }
    }
    n.parent = find_parent(idx, widgets);
    return n;
}

GuiSnapshot build_profiles(PixelImage image, std::vector<detect::RawWidget> widgets,
                           DeviceTag tag, int page_offset) {
    GuiSnapshot snap;
    snap.digest = digest::image_digest(image);
    snap.image = std::move(image);
    snap.widgets = std::move(widgets);
    snap.device_tag = std::move(tag);
    snap.page_offset = page_offset;
    snap.profiles.resize(snap.widgets.size());

    const int n = static_cast<int>(snap.widgets.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        const detect::RawWidget& w = snap.widgets[i];
        WidgetProfile& p = snap.profiles[i];
        p.location = w.bbox;
        p.shape = compute_shape(w.bbox);
        p.clip = imaging::crop(snap.image, w.bbox);
        p.clip_embedding = imaging::embed_clip(p.clip);
        p.text = w.text;
        p.norm_cx = (w.bbox.left + w.bbox.right) / 2.0 / snap.image.width;
        p.norm_cy = (w.bbox.top + w.bbox.bottom) / 2.0 / snap.image.height;
    }
    for (int i = 0; i < n; ++i) snap.profiles[i].neighbors = find_neighbors(i, snap.widgets);
    return snap;
}

GuiSnapshot detect_gui(const PixelImage& img, const detect::TextProvider& provider,
                       const detect::DetectConfig& cfg, DeviceTag tag, int page_offset) {
    std::vector<detect::RawWidget> widgets = detect::detect_widgets(img, provider, cfg);
    return build_profiles(img, std::move(widgets), std::move(tag), page_offset);
}

}  // namespace guireplay::profile
