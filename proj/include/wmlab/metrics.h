#pragma once

#include <array>

#include "wmlab/image.h"

namespace wmlab {

inline constexpr double kPsnrCap = 100.0;

/// Mean over channels of 10*log10(1/MSE_c); each channel capped at 100 dB.
double psnr(const RasterImage& a, const RasterImage& b);

// SSIM: Gaussian window 11x11, sigma 1.5, K1 = 0.01, K2 = 0.03, L = 1,
// averaged over all fully-contained windows of the luminance plane.
inline constexpr int kSsimWindow = 11;

double ssim(const Plane& a, const Plane& b);
double ssim(const RasterImage& a, const RasterImage& b);

/// Exact derivative of ssim(a, b) with respect to each sample of a.
Plane ssim_grad(const Plane& a, const Plane& b);
/// Derivative with respect to the luminance of a.
Plane ssim_grad(const RasterImage& a, const RasterImage& b);

/// 2 I(A;B) / (H(A) + H(B)) over 256-bin luminance histograms.
double nmi(const RasterImage& a, const RasterImage& b);

struct QualityVector {
    double psnr = kPsnrCap;
    double ssim = 1.0;
    double nmi = 1.0;
};

QualityVector measure_quality(const RasterImage& reference, const RasterImage& test);

struct MetricRange {
    double best;
    double worst;
};

struct QualityConfig {
    std::array<double, 3> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};  // psnr, ssim, nmi
    MetricRange psnr{45.0, 15.0};
    MetricRange ssim{1.0, 0.5};
    MetricRange nmi{1.0, 0.1};

    void validate() const;
};

/// Weighted sum of per-metric degradations clamped to [0,1]; 0 is perfect.
double quality_aggregate(const QualityVector& q, const QualityConfig& cfg = {});

/// Euclidean combination of detection and quality scores.
double total_score(double detection, double quality);

}  // namespace wmlab
