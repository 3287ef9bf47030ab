#include "guireplay/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace guireplay::imaging {

namespace {

inline std::uint8_t luma(const std::uint8_t* p) {
    // Rec.601 weights; +0.5 for round-half-up on non-negative input.
    return static_cast<std::uint8_t>(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2] + 0.5);
}

inline int grad_at(const GrayImage& g, int x, int y) {
    // Forward difference; the last column/row falls back to the inward one.
    int xs = (x + 1 < g.width) ? x : x - 1;
    int ys = (y + 1 < g.height) ? y : y - 1;
    int dx = g.width > 1 ? std::abs(int(g.at(xs + 1, y)) - int(g.at(xs, y))) : 0;
    int dy = g.height > 1 ? std::abs(int(g.at(x, ys + 1)) - int(g.at(x, ys))) : 0;
    return std::max(dx, dy);
}

void check_binarize_args(const GrayImage& gray, int threshold) {
    if (threshold < 1 || threshold > 255)
        throw ConfigError("gradient_binarize: threshold must be in [1, 255]");
    if (gray.width <= 0 || gray.height <= 0)
        throw ContractError("gradient_binarize: empty image");
}

}  // namespace

// ---------------------------------------------------------------------------
// serial reference kernels
// ---------------------------------------------------------------------------

namespace serial {

GrayImage to_grayscale(const PixelImage& img) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.set(x, y, luma(img.at(x, y)));
    return out;
}

BinaryMap gradient_binarize(const GrayImage& gray, int threshold) {
    check_binarize_args(gray, threshold);
    BinaryMap out(gray.width, gray.height);
    for (int y = 0; y < gray.height; ++y)
        for (int x = 0; x < gray.width; ++x) out.set(x, y, grad_at(gray, x, y) > threshold);
    return out;
}

GrayImage downscale_luma(const GrayImage& gray, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
    for (int cy = 0; cy < out_h; ++cy) {
        int y0 = static_cast<int>(static_cast<long long>(cy) * gray.height / out_h);
        int y1 = static_cast<int>(static_cast<long long>(cy + 1) * gray.height / out_h);
        y1 = std::max(y1, y0 + 1);
        for (int cx = 0; cx < out_w; ++cx) {
            int x0 = static_cast<int>(static_cast<long long>(cx) * gray.width / out_w);
            int x1 = static_cast<int>(static_cast<long long>(cx + 1) * gray.width / out_w);
            x1 = std::max(x1, x0 + 1);
            long long sum = 0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) sum += gray.at(x, y);
            out.set(cx, cy, static_cast<std::uint8_t>(sum / ((y1 - y0) * (x1 - x0))));
        }
    }
    return out;
}

PixelImage resize_nearest(const PixelImage& img, int out_w, int out_h) {
    PixelImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        int sy = static_cast<int>(static_cast<long long>(y) * img.height / out_h);
        for (int x = 0; x < out_w; ++x) {
            int sx = static_cast<int>(static_cast<long long>(x) * img.width / out_w);
            const std::uint8_t* p = img.at(sx, sy);
            out.set(x, y, p[0], p[1], p[2]);
        }
    }
    return out;
}

std::vector<double> ncc_score_map(const GrayImage& target, const GrayImage& clip) {
    const int ph = target.height - clip.height + 1;
    const int pw = target.width - clip.width + 1;
    const long long n = static_cast<long long>(clip.width) * clip.height;

    double clip_mean = 0.0;
    for (std::uint8_t v : clip.data) clip_mean += v;
    clip_mean /= static_cast<double>(n);
    double clip_var = 0.0;
    for (std::uint8_t v : clip.data) clip_var += (v - clip_mean) * (v - clip_mean);

    std::vector<double> scores(static_cast<size_t>(ph) * pw, 0.0);
    for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px) {
            double sum = 0.0, sum2 = 0.0, cross = 0.0;
            for (int y = 0; y < clip.height; ++y) {
                const std::uint8_t* trow = target.data.data() +
                                           static_cast<size_t>(py + y) * target.width + px;
                const std::uint8_t* crow =
                    clip.data.data() + static_cast<size_t>(y) * clip.width;
                for (int x = 0; x < clip.width; ++x) {
                    double t = trow[x];
                    sum += t;
                    sum2 += t * t;
                    cross += t * (crow[x] - clip_mean);
                }
            }
            double t_var = sum2 - sum * sum / static_cast<double>(n);
            double denom = std::sqrt(std::max(0.0, t_var) * clip_var);
            scores[static_cast<size_t>(py) * pw + px] = denom > 1e-12 ? cross / denom : 0.0;
        }
    }
    return scores;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP kernels
// ---------------------------------------------------------------------------

GrayImage to_grayscale(const PixelImage& img) {
    GrayImage out(img.width, img.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.set(x, y, luma(img.at(x, y)));
    return out;
}

BinaryMap gradient_binarize(const GrayImage& gray, int threshold) {
    check_binarize_args(gray, threshold);
    BinaryMap out(gray.width, gray.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < gray.height; ++y)
        for (int x = 0; x < gray.width; ++x) out.set(x, y, grad_at(gray, x, y) > threshold);
    return out;
}

GrayImage downscale_luma(const GrayImage& gray, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
#pragma omp parallel for schedule(static)
    for (int cy = 0; cy < out_h; ++cy) {
        int y0 = static_cast<int>(static_cast<long long>(cy) * gray.height / out_h);
        int y1 = std::max(
            static_cast<int>(static_cast<long long>(cy + 1) * gray.height / out_h), y0 + 1);
        for (int cx = 0; cx < out_w; ++cx) {
            int x0 = static_cast<int>(static_cast<long long>(cx) * gray.width / out_w);
            int x1 = std::max(
                static_cast<int>(static_cast<long long>(cx + 1) * gray.width / out_w), x0 + 1);
            long long sum = 0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) sum += gray.at(x, y);
            out.set(cx, cy, static_cast<std::uint8_t>(sum / ((y1 - y0) * (x1 - x0))));
        }
    }
    return out;
}

PixelImage resize_nearest(const PixelImage& img, int out_w, int out_h) {
    PixelImage out(out_w, out_h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y) {
        int sy = static_cast<int>(static_cast<long long>(y) * img.height / out_h);
        for (int x = 0; x < out_w; ++x) {
            int sx = static_cast<int>(static_cast<long long>(x) * img.width / out_w);
            const std::uint8_t* p = img.at(sx, sy);
            out.set(x, y, p[0], p[1], p[2]);
        }
    }
    return out;
}

std::vector<double> ncc_score_map(const GrayImage& target, const GrayImage& clip) {
    const int ph = target.height - clip.height + 1;
    const int pw = target.width - clip.width + 1;
    const long long n = static_cast<long long>(clip.width) * clip.height;

    double clip_mean = 0.0;
    for (std::uint8_t v : clip.data) clip_mean += v;
    clip_mean /= static_cast<double>(n);
    double clip_var = 0.0;
    for (std::uint8_t v : clip.data) clip_var += (v - clip_mean) * (v - clip_mean);

    std::vector<double> scores(static_cast<size_t>(ph) * pw, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px) {
            double sum = 0.0, sum2 = 0.0, cross = 0.0;
            for (int y = 0; y < clip.height; ++y) {
                const std::uint8_t* trow = target.data.data() +
                                           static_cast<size_t>(py + y) * target.width + px;
                const std::uint8_t* crow =
                    clip.data.data() + static_cast<size_t>(y) * clip.width;
                for (int x = 0; x < clip.width; ++x) {
                    double t = trow[x];
                    sum += t;
                    sum2 += t * t;
                    cross += t * (crow[x] - clip_mean);
                }
            }
            double t_var = sum2 - sum * sum / static_cast<double>(n);
            double denom = std::sqrt(std::max(0.0, t_var) * clip_var);
            scores[static_cast<size_t>(py) * pw + px] = denom > 1e-12 ? cross / denom : 0.0;
        }
    }
    return scores;
}

// ---------------------------------------------------------------------------
// Flood-fill connected component labelling (serial; the scan order defines
// the deterministic region order).
// ---------------------------------------------------------------------------

std::vector<Region> connected_components(const BinaryMap& map, long long min_area) {
    if (min_area < 1) throw ContractError("connected_components: min_area must be >= 1");
    const int w = map.width, h = map.height;
    std::vector<Region> regions;
    if (w <= 0 || h <= 0) return regions;

    std::vector<std::int32_t> label(static_cast<size_t>(w) * h, -1);
    std::vector<Point> stack;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            size_t si = static_cast<size_t>(sy) * w + sx;
            if (!map.bits[si] || label[si] >= 0) continue;

            Region r;
            r.bbox = {sy, sx, sy + 1, sx + 1};
            std::int32_t id = static_cast<std::int32_t>(regions.size());
            label[si] = id;
            stack.clear();
            stack.push_back({sx, sy});
            while (!stack.empty()) {
                Point p = stack.back();
                stack.pop_back();
                r.pixels.push_back(p);
                r.bbox.top = std::min(r.bbox.top, p.y);
                r.bbox.left = std::min(r.bbox.left, p.x);
                r.bbox.bottom = std::max(r.bbox.bottom, p.y + 1);
                r.bbox.right = std::max(r.bbox.right, p.x + 1);
                const int nx[4] = {p.x - 1, p.x + 1, p.x, p.x};
                const int ny[4] = {p.y, p.y, p.y - 1, p.y + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                    size_t ni = static_cast<size_t>(ny[k]) * w + nx[k];
                    if (map.bits[ni] && label[ni] < 0) {
                        label[ni] = id;
                        stack.push_back({nx[k], ny[k]});
                    }
                }
            }
            r.area = static_cast<long long>(r.pixels.size());
            regions.push_back(std::move(r));
        }
    }

    std::erase_if(regions, [min_area](const Region& r) { return r.area < min_area; });
    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
        if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
        if (a.bbox.left != b.bbox.left) return a.bbox.left < b.bbox.left;
        return a.area > b.area;
    });
    return regions;
}

PixelImage crop(const PixelImage& img, const Bbox& box) {
    if (!box.valid() || box.right > img.width || box.bottom > img.height)
        throw BoundsError("crop: box outside image bounds");
    PixelImage out(box.width(), box.height());
    for (int y = 0; y < out.height; ++y) {
        const std::uint8_t* src = img.at(box.left, box.top + y);
        std::memcpy(out.data.data() + out.index(0, y), src, static_cast<size_t>(out.width) * 3);
    }
    return out;
}

FeatureVector embed_clip(const PixelImage& clip) {
    if (clip.empty()) throw ContractError("embed_clip: empty clip");

    PixelImage r = resize_nearest(clip, kEmbedResize, kEmbedResize);

    bool constant = true;
    for (size_t i = 3; i < r.data.size() && constant; i += 3)
        constant = r.data[i] == r.data[0] && r.data[i + 1] == r.data[1] &&
                   r.data[i + 2] == r.data[2];

    FeatureVector v(kFeatureDims, 0.0);

    // 8x8 grid of mean luminance, scaled to [0, 1].
    const int block = kEmbedResize / kEmbedGridSide;
    for (int gy = 0; gy < kEmbedGridSide; ++gy) {
        for (int gx = 0; gx < kEmbedGridSide; ++gx) {
            double sum = 0.0;
            for (int y = gy * block; y < (gy + 1) * block; ++y)
                for (int x = gx * block; x < (gx + 1) * block; ++x) {
                    const std::uint8_t* p = r.at(x, y);
                    sum += 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
                }
            v[gy * kEmbedGridSide + gx] = sum / (block * block * 255.0);
        }
    }

    // 16-bin per-channel histogram fractions.
    const double inv_n = 1.0 / (kEmbedResize * kEmbedResize);
    for (int y = 0; y < kEmbedResize; ++y)
        for (int x = 0; x < kEmbedResize; ++x) {
            const std::uint8_t* p = r.at(x, y);
            for (int c = 0; c < 3; ++c)
                v[kEmbedGridSide * kEmbedGridSide + c * kEmbedHistBins + p[c] / 16] += inv_n;
        }

    if (!constant) {
        double lum_mean = 0.0;
        for (int i = 0; i < 64; ++i) lum_mean += v[i];
        lum_mean /= 64.0;
        for (int i = 0; i < 64; ++i) v[i] -= lum_mean;
        double hist_mean = 0.0;
        for (int i = 64; i < kFeatureDims; ++i) hist_mean += v[i];
        hist_mean /= 48.0;
        for (int i = 64; i < kFeatureDims; ++i) v[i] -= hist_mean;
    }

    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        // Degenerate after centring: fall back to the raw histogram vector.
        std::fill(v.begin(), v.begin() + 64, 0.0);
        v[64] = 1.0;
        norm = 1.0;
    }
    for (double& x : v) x /= norm;
    return v;
}

double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
    if (a.size() != b.size())
        throw ContractError("cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na < 1e-24 || nb < 1e-24) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace guireplay::imaging
