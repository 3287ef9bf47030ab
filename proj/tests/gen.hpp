#pragma once

// Seeded random snapshot pairs for the matcher-vs-oracle property tests:
// shared text vocabulary and embedding pools plant duplicates, containment
// relations and threshold-edge similarities on both sides.

#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"

namespace testgen {

using namespace guireplay;
using testutil::WidgetSpec;

inline FeatureVector random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    FeatureVector v(kFeatureDims);
    double norm = 0;
    for (double& x : v) {
        x = n(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

/// Unit vector at a planted cosine against `base`.
inline FeatureVector at_cosine(const FeatureVector& base, double c, std::mt19937_64& rng) {
    FeatureVector other = random_unit(rng);
    double d = 0;
    for (size_t i = 0; i < base.size(); ++i) d += base[i] * other[i];
    FeatureVector ortho(base.size());
    double norm = 0;
    for (size_t i = 0; i < base.size(); ++i) {
        ortho[i] = other[i] - d * base[i];
        norm += ortho[i] * ortho[i];
    }
    norm = std::sqrt(norm);
    FeatureVector out(base.size());
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (size_t i = 0; i < base.size(); ++i) out[i] = c * base[i] + s * ortho[i] / norm;
    return out;
}

struct SnapshotPool {
    std::vector<FeatureVector> embeddings;
    std::vector<std::string> texts;
};

inline SnapshotPool make_pool(std::mt19937_64& rng) {
    SnapshotPool pool;
    for (int i = 0; i < 6; ++i) pool.embeddings.push_back(random_unit(rng));
    const char* words[] = {"alpha", "beta", "gamma", "delta", "omega", "sigma"};
    for (const char* w : words) pool.texts.push_back(w);
    pool.texts.push_back("alpha beta");
    pool.texts.push_back("beta gamma delta");
    pool.texts.push_back("alpha beta gamma delta");
    return pool;
}

inline profile::GuiSnapshot random_snapshot(const SnapshotPool& pool, std::mt19937_64& rng,
                                            int max_widgets, const std::string& name) {
    int w = 360 + static_cast<int>(rng() % 4) * 120;
    int h = 640 + static_cast<int>(rng() % 4) * 160;
    int count = 1 + static_cast<int>(rng() % max_widgets);

    std::vector<WidgetSpec> specs;
    bool with_container = count >= 4 && rng() % 2 == 0;
    int start = 0;
    if (with_container) {
        WidgetSpec c;
        c.box = {20, 20, h / 2, w - 20};
        c.kind = detect::WidgetKind::NonText;
        c.container = true;
        if (rng() % 2) c.text = pool.texts[rng() % pool.texts.size()];
        c.embedding = pool.embeddings[rng() % pool.embeddings.size()];
        specs.push_back(std::move(c));
        start = 1;
    }
    int cols = 3;
    int cell_w = (w - 40) / cols;
    int cell_h = 90;
    for (int i = start; i < count; ++i) {
        int slot = i - start;
        int cx = 20 + (slot % cols) * cell_w;
        int cy = 40 + (slot / cols) * cell_h;
        int bw = 30 + static_cast<int>(rng() % std::max(10, cell_w - 40));
        int bh = 20 + static_cast<int>(rng() % 50);
        WidgetSpec s;
        s.box = {cy, cx, std::min(cy + bh, h - 1), std::min(cx + bw, w - 1)};
        if (!s.box.valid()) continue;
        bool text = rng() % 2 == 0;
        s.kind = text ? detect::WidgetKind::Text : detect::WidgetKind::NonText;
        if (text || rng() % 4 == 0) s.text = pool.texts[rng() % pool.texts.size()];
        int which = static_cast<int>(rng() % (pool.embeddings.size() + 2));
        if (which < static_cast<int>(pool.embeddings.size())) {
            s.embedding = pool.embeddings[which];
            int tweak = static_cast<int>(rng() % 4);
            if (tweak == 1) s.embedding = at_cosine(pool.embeddings[which], 0.9, rng);
            if (tweak == 2) s.embedding = at_cosine(pool.embeddings[which], 0.8, rng);
            if (tweak == 3) s.embedding = at_cosine(pool.embeddings[which], 0.799, rng);
        } else {
            s.embedding = random_unit(rng);
        }
        specs.push_back(std::move(s));
    }
    return testutil::make_snapshot(w, h, specs, name);
}

}  // namespace testgen
