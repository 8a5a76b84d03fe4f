#include "wmlab/image.h"

#include <algorithm>

namespace wmlab {

RasterImage::RasterImage(int width, int height, double fill)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw Error("RasterImage: dimensions must be positive");
    data_.assign(std::size_t(width) * height * 3, std::clamp(fill, 0.0, 1.0));
}

RasterImage::RasterImage(int width, int height, std::vector<double> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
    if (width <= 0 || height <= 0) throw Error("RasterImage: dimensions must be positive");
    if (data_.size() != std::size_t(width) * height * 3)
        throw Error("RasterImage: buffer size does not match dimensions");
    clamp();
}

void RasterImage::clamp() {
    for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
}

void require_same_shape(const RasterImage& a, const RasterImage& b, const char* what) {
    if (!a.same_shape(b))
        throw Error(std::string(what) + ": image dimensions differ");
}

Plane luminance(const RasterImage& img) {
    Plane out(img.width(), img.height());
    auto src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        out.v[i] = kLumaR * src[3 * i] + kLumaG * src[3 * i + 1] + kLumaB * src[3 * i + 2];
    return out;
}

RasterImage add_luminance(const RasterImage& img, const Plane& delta) {
    if (delta.width != img.width() || delta.height != img.height())
        throw Error("add_luminance: plane dimensions differ");
    RasterImage out = img;
    auto dst = out.data();
    for (std::size_t i = 0; i < delta.size(); ++i)
        for (int c = 0; c < 3; ++c) dst[3 * i + c] += delta.v[i];
    out.clamp();
    return out;
}

RasterImage replace_luminance(const RasterImage& img, const Plane& luma) {
    Plane current = luminance(img);
    Plane delta(img.width(), img.height());
    for (std::size_t i = 0; i < delta.size(); ++i) delta.v[i] = luma.v[i] - current.v[i];
    return add_luminance(img, delta);
}

RasterImage translate_right(const RasterImage& img, int dx) {
    if (dx < 0) throw Error("translate_right: dx must be non-negative");
    if (dx >= img.width()) throw Error("translate_right: dx must be smaller than the image width");
    RasterImage out = img;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            int src = x >= dx ? x - dx : 0;
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, src, c);
        }
    return out;
}

RasterImage restore_left_columns(const RasterImage& shifted, const RasterImage& original, int dx) {
    require_same_shape(shifted, original, "restore_left_columns");
    if (dx < 0 || dx >= shifted.width())
        throw Error("restore_left_columns: dx must lie in [0, width)");
    RasterImage out = shifted;
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < dx; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = original.at(y, x, c);
    return out;
}

}  // namespace wmlab
