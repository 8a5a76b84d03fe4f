#include "wmlab/spectral.h"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <utility>

namespace wmlab {

namespace {

// FFTW planning is not thread-safe; execution with new-array variants is.
// Plans are cached per (height, width, direction) and reused with buffers
// from fftw_malloc, which share the planner's alignment.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int h, int w, int sign) {
        std::lock_guard lock(mu_);
        auto key = std::make_tuple(h, w, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* in = fftw_alloc_complex(std::size_t(h) * w);
        auto* out = fftw_alloc_complex(std::size_t(h) * w);
        fftw_plan p = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

void run_dft(int h, int w, int sign, const cplx* src, cplx* dst) {
    std::size_t n = std::size_t(h) * w;
    FftwBuffer in(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        in.ptr[i][0] = src[i].real();
        in.ptr[i][1] = src[i].imag();
    }
    fftw_execute_dft(PlanCache::instance().get(h, w, sign), in.ptr, out.ptr);
    for (std::size_t i = 0; i < n; ++i) dst[i] = {out.ptr[i][0], out.ptr[i][1]};
}

std::vector<double> profile_impl(const Spectrum& spec, int cross_half_width) {
    int h = spec.height, w = spec.width;
    int rmax = int(std::lround(std::hypot(h / 2.0, w / 2.0)));
    std::vector<double> sum(rmax + 1, 0.0);
    std::vector<int> count(rmax + 1, 0);
    for (int u = 0; u < h; ++u) {
        int fu = signed_freq(u, h);
        for (int v = 0; v < w; ++v) {
            int fv = signed_freq(v, w);
            if (fu == 0 && fv == 0) continue;
            if (cross_half_width >= 0 && (std::abs(fu) <= cross_half_width || std::abs(fv) <= cross_half_width))
                continue;
            int r = int(std::lround(std::hypot(double(fu), double(fv))));
            sum[r] += std::log1p(std::abs(spec(u, v)));
            ++count[r];
        }
    }
    std::vector<double> out(rmax + 1, 0.0);
    for (int r = 0; r <= rmax; ++r)
        if (count[r] > 0) out[r] = sum[r] / count[r];
    return out;
}

}  // namespace

Spectrum fft2(const Plane& plane) {
    Spectrum out(plane.width, plane.height);
    std::vector<cplx> src(plane.v.begin(), plane.v.end());
    run_dft(plane.height, plane.width, FFTW_FORWARD, src.data(), out.coeffs.data());
    return out;
}

Spectrum fft2(const RasterImage& img) { return fft2(luminance(img)); }

Plane ifft2(const Spectrum& spec) {
    std::vector<cplx> tmp(spec.coeffs.size());
    run_dft(spec.height, spec.width, FFTW_BACKWARD, spec.coeffs.data(), tmp.data());
    Plane out(spec.width, spec.height);
    double scale = 1.0 / double(tmp.size());
    for (std::size_t i = 0; i < tmp.size(); ++i) out.v[i] = tmp[i].real() * scale;
    return out;
}

Plane centered_log_magnitude(const Spectrum& spec) {
    Plane out(spec.width, spec.height);
    for (int u = 0; u < spec.height; ++u)
        for (int v = 0; v < spec.width; ++v) {
            int cu = (u + spec.height / 2) % spec.height;
            int cv = (v + spec.width / 2) % spec.width;
            out(cu, cv) = std::log1p(std::abs(spec(u, v)));
        }
    return out;
}

std::vector<double> radial_profile(const Spectrum& spec) { return profile_impl(spec, -1); }

std::vector<double> radial_profile_excluding_cross(const Spectrum& spec, int half_width) {
    return profile_impl(spec, half_width);
}

}  // namespace wmlab
