#pragma once

#include <complex>
#include <vector>

#include "wmlab/image.h"

namespace wmlab {

using cplx = std::complex<double>;

/// 2D DFT coefficients of one real plane. DC at (0,0), row-major over
/// (u = row frequency, v = column frequency). Unnormalised forward transform;
/// the inverse applies 1/(H*W).
struct Spectrum {
    int width = 0;
    int height = 0;
    std::vector<cplx> coeffs;

    Spectrum() = default;
    Spectrum(int w, int h) : width(w), height(h), coeffs(std::size_t(w) * h) {}

    cplx& operator()(int u, int v) { return coeffs[std::size_t(u) * width + v]; }
    const cplx& operator()(int u, int v) const { return coeffs[std::size_t(u) * width + v]; }
};

Spectrum fft2(const Plane& plane);
/// Spectrum of the Rec.601 luminance.
Spectrum fft2(const RasterImage& img);
/// Real part of the inverse transform.
Plane ifft2(const Spectrum& spec);

/// Signed frequency of index k on an axis of length n, in [-n/2, n/2).
inline int signed_freq(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }
/// Index of signed frequency f on an axis of length n.
inline int freq_index(int f, int n) { return ((f % n) + n) % n; }

/// log(1 + |X|) with DC moved to the centre (fftshift), for inspection and
/// the projection-based detectors.
Plane centered_log_magnitude(const Spectrum& spec);

/// Mean log(1+|X|) over bins whose centred radius rounds to r, DC excluded.
/// Radii with no bins hold the floor value 0.
std::vector<double> radial_profile(const Spectrum& spec);

/// Same as radial_profile but also excludes the DC cross (|u| <= half_width
/// or |v| <= half_width).
std::vector<double> radial_profile_excluding_cross(const Spectrum& spec, int half_width);

}  // namespace wmlab
