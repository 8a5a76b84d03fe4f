#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wmlab/image.h"
#include "wmlab/rng.h"
#include "wmlab/spectral.h"

namespace testutil {

/// Uniform RGB samples in [lo, hi).
inline wmlab::RasterImage random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    wmlab::rng::Stream s(seed, 0x7e57);
    std::vector<double> v(std::size_t(w) * h * 3);
    for (double& x : v) x = s.uniform_in(lo, hi);
    return wmlab::RasterImage(w, h, std::move(v));
}

/// Grey image with R = G = B.
inline wmlab::RasterImage grey_image(const wmlab::Plane& p) {
    wmlab::RasterImage img(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = p(y, x);
    return img;
}

inline wmlab::Plane random_plane(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    wmlab::rng::Stream s(seed, 0x91a);
    wmlab::Plane p(w, h);
    for (double& x : p.v) x = s.uniform_in(lo, hi);
    return p;
}

/// Textbook O(N^2) 2D DFT, X(u,v) = sum x(y,x) exp(-2 pi i (u y / H + v x / W)).
inline std::vector<std::complex<double>> naive_dft(const wmlab::Plane& p) {
    const int H = p.height, W = p.width;
    std::vector<std::complex<double>> out(std::size_t(H) * W);
    for (int u = 0; u < H; ++u)
        for (int v = 0; v < W; ++v) {
            std::complex<double> acc;
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    double ang = -2.0 * std::numbers::pi * (double(u) * y / H + double(v) * x / W);
                    acc += p(y, x) * std::complex<double>(std::cos(ang), std::sin(ang));
                }
            out[std::size_t(u) * W + v] = acc;
        }
    return out;
}

/// Direct per-channel MSE, no shortcuts.
inline double direct_mse(const wmlab::RasterImage& a, const wmlab::RasterImage& b, int c) {
    double s = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            double d = a.at(y, x, c) - b.at(y, x, c);
            s += d * d;
        }
    return s / double(a.pixel_count());
}

}  // namespace testutil
