#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmlab {

/// Thrown on any contract violation (bad dimensions, out-of-range parameters).
class Error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Single-channel real-valued grid, row-major. Used for luminance planes,
/// gradients and intermediate maps; values are not clamped.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0) : width(w), height(h), v(std::size_t(w) * h, fill) {}

    double& operator()(int y, int x) { return v[std::size_t(y) * width + x]; }
    double operator()(int y, int x) const { return v[std::size_t(y) * width + x]; }
    std::size_t size() const { return v.size(); }
};

/// H x W x 3 sRGB raster with values in [0,1], interleaved RGB, row-major.
///
/// Every public operation that returns a RasterImage clamps to [0,1] first.
/// Dimensions are fixed at construction.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, double fill = 0.0);
    RasterImage(int width, int height, std::vector<double> rgb);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t pixel_count() const { return std::size_t(width_) * height_; }

    double& at(int y, int x, int c) { return data_[(std::size_t(y) * width_ + x) * 3 + c]; }
    double at(int y, int x, int c) const { return data_[(std::size_t(y) * width_ + x) * 3 + c]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    void clamp();
    bool same_shape(const RasterImage& o) const { return width_ == o.width_ && height_ == o.height_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Rec.601 luma weights shared by every luminance-domain operation.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

Plane luminance(const RasterImage& img);

/// Adds `delta` equally to R, G and B (a pure luma change under Rec.601
/// weights) and clamps.
RasterImage add_luminance(const RasterImage& img, const Plane& delta);

/// Replaces the luma of `img` by `luma`, keeping each pixel's RGB offset from
/// its own luma. Clamps.
RasterImage replace_luminance(const RasterImage& img, const Plane& luma);

/// Content moves toward larger column index. Columns j < dx hold copies of
/// input column 0 as a placeholder; callers restore them.
RasterImage translate_right(const RasterImage& img, int dx);

/// out(i,j) = original(i,j) for j < dx, shifted(i,j) otherwise.
RasterImage restore_left_columns(const RasterImage& shifted, const RasterImage& original, int dx);

void require_same_shape(const RasterImage& a, const RasterImage& b, const char* what);

}  // namespace wmlab
