#pragma once

#include "guireplay/types.hpp"

namespace guireplay::imaging {

// Pixel kernels. The default entry points run OpenMP-parallel loops; the
// `serial` namespace keeps straightforward single-threaded reference
// implementations that the tests compare against bit-for-bit and the
// bench_kernels target times against.

/// Rec.601 luminance: round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_grayscale(const PixelImage& img);

/// Foreground where max(|dx|, |dy|) > threshold, forward differences.
/// Border pixels use the inward difference. threshold must be in [1, 255].
BinaryMap gradient_binarize(const GrayImage& gray, int threshold);

/// Maximal 4-connected foreground regions with area >= min_area,
/// ordered by (bbox.top, bbox.left, area descending).
std::vector<Region> connected_components(const BinaryMap& map, long long min_area);

/// Copies the sub-rectangle `box` out of `img`. Throws BoundsError when the
/// box leaves the image.
PixelImage crop(const PixelImage& img, const Bbox& box);

/// Deterministic 112-dim clip descriptor: nearest-neighbour resize to 64x64,
/// 8x8 grid of mean luminance (scaled to [0,1]) plus 16-bin per-channel RGB
/// histogram fractions; both parts mean-centred and the whole vector
/// L2-normalized. Constant-colour clips skip the centring and normalize the
/// raw vector instead.
FeatureVector embed_clip(const PixelImage& clip);

/// Plain cosine similarity; throws ContractError on length mismatch.
double cosine_similarity(const FeatureVector& a, const FeatureVector& b);

/// Box-filter downscale of the luminance image onto a fixed grid, used by the
/// GUI-unchanged check. Cell value = integer mean of the covered pixels.
GrayImage downscale_luma(const GrayImage& gray, int out_w, int out_h);

/// Nearest-neighbour resize, src index = (dst * src_dim) / dst_dim.
PixelImage resize_nearest(const PixelImage& img, int out_w, int out_h);

namespace serial {

GrayImage to_grayscale(const PixelImage& img);
BinaryMap gradient_binarize(const GrayImage& gray, int threshold);
GrayImage downscale_luma(const GrayImage& gray, int out_w, int out_h);
PixelImage resize_nearest(const PixelImage& img, int out_w, int out_h);

/// Full score map of the normalized cross-correlation sweep; one score per
/// valid placement, row-major over (target_h - clip_h + 1) x (target_w - clip_w + 1).
std::vector<double> ncc_score_map(const GrayImage& target, const GrayImage& clip);

}  // namespace serial

/// OpenMP version of the NCC score map (identical values, disjoint writes).
std::vector<double> ncc_score_map(const GrayImage& target, const GrayImage& clip);

}  // namespace guireplay::imaging
