#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace guireplay {

// ----------------------------------------------------------------------------
// Error hierarchy
// ----------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ScreenNotFound : public Error {
public:
    using Error::Error;
};

class AmbiguousScreen : public Error {
public:
    using Error::Error;
};

class TextProviderError : public Error {
public:
    using Error::Error;
};

class DeviceIOError : public Error {
public:
    using Error::Error;
};

class PageNotFound : public Error {
public:
    using Error::Error;
};

class RecordError : public Error {
public:
    using Error::Error;
};

// ----------------------------------------------------------------------------
// Pixel containers
// ----------------------------------------------------------------------------

/// Raw 8-bit RGB raster, row-major, 3 bytes per pixel.
struct PixelImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width * height * 3

    PixelImage() = default;
    PixelImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {
        if (w <= 0 || h <= 0) throw ContractError("PixelImage: non-positive dimensions");
    }
    PixelImage(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) : PixelImage(w, h) {
        fill(r, g, b);
    }

    bool empty() const { return width == 0 || height == 0; }

    size_t index(int x, int y) const { return (static_cast<size_t>(y) * width + x) * 3; }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        size_t i = index(x, y);
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
    const std::uint8_t* at(int x, int y) const { return data.data() + index(x, y); }

    void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        for (size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    bool operator==(const PixelImage& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

/// Single-channel 8-bit luminance raster.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { data[static_cast<size_t>(y) * width + x] = v; }

    bool operator==(const GrayImage& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

/// One byte per pixel, nonzero = foreground.
struct BinaryMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMap() = default;
    BinaryMap(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

    bool operator==(const BinaryMap& o) const {
        return width == o.width && height == o.height && bits == o.bits;
    }
};

// ----------------------------------------------------------------------------
// Geometry
// ----------------------------------------------------------------------------

/// Half-open pixel box: rows [top, bottom), columns [left, right).
struct Bbox {
    int top = 0;
    int left = 0;
    int bottom = 0;
    int right = 0;

    int width() const { return right - left; }
    int height() const { return bottom - top; }
    long long area() const { return static_cast<long long>(width()) * height(); }

    bool valid() const { return top >= 0 && left >= 0 && top < bottom && left < right; }

    bool contains_point(int x, int y) const {
        return x >= left && x < right && y >= top && y < bottom;
    }
    /// True when `o` lies inside this box (edges may coincide).
    bool contains(const Bbox& o) const {
        return o.top >= top && o.left >= left && o.bottom <= bottom && o.right <= right;
    }
    /// True when `o` lies inside this box with no shared edges.
    bool strictly_contains(const Bbox& o) const {
        return contains(o) && !(o.top == top && o.left == left && o.bottom == bottom &&
                                o.right == right);
    }
    bool intersects(const Bbox& o) const {
        return left < o.right && o.left < right && top < o.bottom && o.top < bottom;
    }
    Bbox intersect(const Bbox& o) const {
        Bbox r{std::max(top, o.top), std::max(left, o.left), std::min(bottom, o.bottom),
               std::min(right, o.right)};
        if (r.top >= r.bottom || r.left >= r.right) return Bbox{0, 0, 0, 0};
        return r;
    }

    bool operator==(const Bbox& o) const {
        return top == o.top && left == o.left && bottom == o.bottom && right == o.right;
    }
};

inline double bbox_iou(const Bbox& a, const Bbox& b) {
    Bbox i = a.intersect(b);
    double inter = static_cast<double>(i.area());
    double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

/// A 4-connected foreground region found by component labelling.
struct Region {
    std::vector<Point> pixels;
    Bbox bbox;
    long long area = 0;
};

// ----------------------------------------------------------------------------
// Feature vectors
// ----------------------------------------------------------------------------

inline constexpr int kFeatureDims = 112;     // 64 block luminances + 48 histogram bins
inline constexpr int kEmbedGridSide = 8;     // 8x8 luminance grid
inline constexpr int kEmbedResize = 64;      // clips resized to 64x64
inline constexpr int kEmbedHistBins = 16;    // per-channel histogram bins

using FeatureVector = std::vector<double>;   // always kFeatureDims long

}  // namespace guireplay
