#include "wmlab/corpus.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "wmlab/parallel.h"
#include "wmlab/rng.h"

namespace wmlab {

namespace {

constexpr std::uint64_t kStreamCorpus = 0x434f5250;  // "CORP"

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double smoothstep(double e0, double e1, double x) {
    double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return smooth(t);
}

struct ValueNoise {
    int cells;
    std::vector<double> lattice;  // (cells+1)^2

    ValueNoise(int cells_, rng::Stream& rs) : cells(cells_), lattice(std::size_t(cells_ + 1) * (cells_ + 1)) {
        for (double& v : lattice) v = rs.uniform_in(-1.0, 1.0);
    }

    double at(double fy, double fx) const {  // fy, fx in [0,1]
        double gy = fy * cells, gx = fx * cells;
        int iy = std::min(int(gy), cells - 1), ix = std::min(int(gx), cells - 1);
        double ty = smooth(gy - iy), tx = smooth(gx - ix);
        auto L = [&](int y, int x) { return lattice[std::size_t(y) * (cells + 1) + x]; };
        double top = L(iy, ix) * (1 - tx) + L(iy, ix + 1) * tx;
        double bot = L(iy + 1, ix) * (1 - tx) + L(iy + 1, ix + 1) * tx;
        return top * (1 - ty) + bot * ty;
    }
};

}  // namespace

RasterImage gen_cover(int size, std::uint64_t seed, std::uint64_t index) {
    if (size < 16) throw Error("gen_cover: size must be at least 16");
    rng::Stream rs(rng::item_seed(seed, index), kStreamCorpus);
    const double n = size;

    std::array<double, 3> base, gx, gy;
    for (int c = 0; c < 3; ++c) {
        base[c] = rs.uniform_in(0.25, 0.75);
        gx[c] = rs.uniform_in(-0.35, 0.35);
        gy[c] = rs.uniform_in(-0.35, 0.35);
    }

    // Octaves: 2, 4 and 8 lattice cells across the image.
    std::vector<ValueNoise> octaves;
    std::vector<double> octave_amp;
    std::vector<std::array<double, 3>> octave_tint;
    double amp = rs.uniform_in(0.12, 0.22);
    for (int cells : {2, 4, 8}) {
        octaves.emplace_back(cells, rs);
        octave_amp.push_back(amp);
        std::array<double, 3> tint;
        for (double& t : tint) t = rs.uniform_in(0.7, 1.3);
        octave_tint.push_back(tint);
        amp *= 0.45;
    }

    struct Blob { double cy, cx, sigma; std::array<double, 3> color; };
    std::vector<Blob> blobs(2 + rs.below(3));
    for (auto& b : blobs) {
        b.cy = rs.uniform_in(0, n);
        b.cx = rs.uniform_in(0, n);
        b.sigma = rs.uniform_in(n / 16, n / 5);
        double a = rs.uniform_in(-0.25, 0.25);
        for (double& c : b.color) c = a * rs.uniform_in(0.6, 1.4);
    }

    struct Shape { bool ellipse; double cy, cx, ry, rx, cosang, sinang, opacity, soft; std::array<double, 3> color; };
    std::vector<Shape> shapes(1 + rs.below(3));
    for (auto& s : shapes) {
        s.ellipse = rs.next_uniform() < 0.5;
        s.cy = rs.uniform_in(0.15 * n, 0.85 * n);
        s.cx = rs.uniform_in(0.15 * n, 0.85 * n);
        s.ry = rs.uniform_in(n / 12, n / 4);
        s.rx = rs.uniform_in(n / 12, n / 4);
        double ang = rs.uniform_in(0, 3.14159265358979);
        s.cosang = std::cos(ang);
        s.sinang = std::sin(ang);
        s.opacity = rs.uniform_in(0.3, 0.7);
        s.soft = rs.uniform_in(1.5, 3.0);
        for (double& c : s.color) c = rs.uniform_in(0.1, 0.9);
    }

    // Sensor-like grain gives every cover a realistic high-frequency floor.
    const double grain_sigma = rs.uniform_in(0.002, 0.005);

    std::vector<double> rgb(std::size_t(size) * size * 3);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double fy = y / n, fx = x / n;
            std::array<double, 3> px;
            for (int c = 0; c < 3; ++c) px[c] = base[c] + gx[c] * (fx - 0.5) + gy[c] * (fy - 0.5);
            for (std::size_t o = 0; o < octaves.size(); ++o) {
                double v = octave_amp[o] * octaves[o].at(fy, fx);
                for (int c = 0; c < 3; ++c) px[c] += v * octave_tint[o][c];
            }
            for (const auto& b : blobs) {
                double d2 = (y - b.cy) * (y - b.cy) + (x - b.cx) * (x - b.cx);
                double g = std::exp(-0.5 * d2 / (b.sigma * b.sigma));
                for (int c = 0; c < 3; ++c) px[c] += g * b.color[c];
            }
            for (const auto& s : shapes) {
                double dy = y - s.cy, dx = x - s.cx;
                double u = s.cosang * dx + s.sinang * dy;
                double v = -s.sinang * dx + s.cosang * dy;
                double sd;
                if (s.ellipse) {
                    double k = std::hypot(u / s.rx, v / s.ry);
                    sd = (k - 1.0) * std::min(s.rx, s.ry);
                } else {
                    double qx = std::abs(u) - s.rx, qy = std::abs(v) - s.ry;
                    sd = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0)) + std::min(std::max(qx, qy), 0.0);
                }
                double cover = s.opacity * (1.0 - smoothstep(-s.soft, s.soft, sd));
                for (int c = 0; c < 3; ++c) px[c] = px[c] * (1 - cover) + s.color[c] * cover;
            }
            double grain = grain_sigma * rng::normal(rng::item_seed(seed, index), kStreamCorpus + 1,
                                                     std::uint64_t(y) * size + x);
            for (int c = 0; c < 3; ++c) {
                double v = 0.05 + 0.9 * std::clamp(px[c] + grain, 0.0, 1.0);
                rgb[(std::size_t(y) * size + x) * 3 + c] = std::round(v * 65536.0) / 65536.0;
            }
        }
    return RasterImage(size, size, std::move(rgb));
}

std::vector<RasterImage> gen_corpus(std::size_t n, int size, std::uint64_t seed, unsigned threads) {
    if (n == 0) throw Error("gen_corpus: n must be at least 1");
    std::vector<RasterImage> out(n);
    parallel_for(n, threads, [&](std::size_t i) { out[i] = gen_cover(size, seed, i); });
    return out;
}

}  // namespace wmlab
