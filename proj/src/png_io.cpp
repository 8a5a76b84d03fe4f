#include "wmlab/png_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace wmlab {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
    (void)png;
    throw std::runtime_error(std::string("libpng: ") + msg);
}

void png_warn(png_structp, png_const_charp) {}

void write_rows(const std::string& path, int width, int height, int color_type,
                const std::vector<png_byte>& pixels, int channels) {
    FilePtr f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p; png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};

    png_init_io(png, f.get());
    png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(&pixels[std::size_t(y) * width * channels]));
    png_write_end(png, nullptr);
}

png_byte quantize(double v) {
    return png_byte(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

RasterImage read_png(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw std::runtime_error(path + ": not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png) throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p; png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};

    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS))
        throw Error(path + ": PNG images with an alpha channel are not supported");

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY) {
        if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_set_gray_to_rgb(png);
    }
    if (bit_depth == 16) png_set_strip_16(png);
    png_read_update_info(png, info);

    int width = int(png_get_image_width(png, info));
    int height = int(png_get_image_height(png, info));
    std::size_t rowbytes = png_get_rowbytes(png, info);
    if (rowbytes != std::size_t(width) * 3)
        throw std::runtime_error(path + ": unexpected PNG row layout");

    std::vector<png_byte> buf(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = &buf[std::size_t(y) * rowbytes];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    std::vector<double> rgb(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) rgb[i] = buf[i] / 255.0;
    return RasterImage(width, height, std::move(rgb));
}

void write_png(const std::string& path, const RasterImage& img) {
    std::vector<png_byte> px(img.data().size());
    auto src = img.data();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = quantize(src[i]);
    write_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, px, 3);
}

void write_png_plane(const std::string& path, const Plane& plane) {
    if (plane.v.empty()) throw Error("write_png_plane: empty plane");
    auto [lo, hi] = std::minmax_element(plane.v.begin(), plane.v.end());
    double span = *hi - *lo;
    std::vector<png_byte> px(plane.size());
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = quantize(span > 0 ? (plane.v[i] - *lo) / span : 0.0);
    write_rows(path, plane.width, plane.height, PNG_COLOR_TYPE_GRAY, px, 1);
}

}  // namespace wmlab
