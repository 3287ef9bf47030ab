#include "guireplay/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>

namespace guireplay::pngio {

namespace {

struct MemReader {
    const std::uint8_t* data;
    size_t size;
    size_t pos;
};

void mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + n > r->size) png_error(png, "png: truncated stream");
    std::memcpy(out, r->data + r->pos, n);
    r->pos += n;
}

void mem_write(png_structp png, png_bytep data, png_size_t n) {
    auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    v->insert(v->end(), data, data + n);
}

void mem_flush(png_structp) {}

PixelImage read_common(png_structp png, png_infop info) {
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    PixelImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = img.data.data() + static_cast<size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    return img;
}

void write_common(png_structp png, png_infop info, const PixelImage& img) {
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    // Fast fixed settings keep encoded bytes identical across runs.
    png_set_compression_level(png, 1);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<std::uint8_t*>(img.data.data()) + static_cast<size_t>(y) * img.width * 3;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
}

}  // namespace

PixelImage read_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("read_png: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("read_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("read_png: decode failed for " + path);
    }
    png_init_io(png, fp);
    PixelImage img = read_common(png, info);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

PixelImage decode_png(const std::vector<std::uint8_t>& bytes) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("decode_png: libpng init failed");
    }
    MemReader reader{bytes.data(), bytes.size(), 0};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("decode_png: decode failed");
    }
    png_set_read_fn(png, &reader, mem_read);
    PixelImage img = read_common(png, info);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const PixelImage& img) {
    if (img.empty()) throw ContractError("write_png: empty image");
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("write_png: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("write_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("write_png: encode failed for " + path);
    }
    png_init_io(png, fp);
    write_common(png, info, img);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

std::vector<std::uint8_t> encode_png(const PixelImage& img) {
    if (img.empty()) throw ContractError("encode_png: empty image");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        throw IoError("encode_png: libpng init failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("encode_png: encode failed");
    }
    png_set_write_fn(png, &out, mem_write, mem_flush);
    write_common(png, info, img);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace guireplay::pngio
