#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmlab/artifacts.h"
#include "wmlab/image.h"
#include "wmlab/spectral.h"
#include "wmlab/watermark.h"

namespace wmlab {

/// Shift right by dx, then copy the first dx columns back from the input.
RasterImage translation_attack(const RasterImage& x_w, int dx = 7);

// ---------------------------------------------------------------------------
// Learned spectral removal filter.

struct SpectralFilter {
    int width = 0;
    int height = 0;
    std::vector<cplx> gains;  // same layout as Spectrum::coeffs
    double ridge = 0.0;
    std::uint64_t key_fingerprint = 0;

    static SpectralFilter identity(int width, int height);
    cplx operator()(int u, int v) const { return gains[std::size_t(u) * width + v]; }
};

/// Accumulates the per-frequency normal equations of
///   sum ||H * Xw - Xi||^2 + ridge * ||H - 1||^2
/// over any number of (input, target) pairs of one size.
class FilterTrainer {
public:
    void add(const RasterImage& input, const RasterImage& target);
    void add(const PairedDataset& pairs);
    std::size_t samples() const { return samples_; }
    /// H[k] = (sum conj(Xw) Xi + ridge) / (sum |Xw|^2 + ridge); a zero
    /// denominator yields H = 1.
    SpectralFilter finish(double ridge, std::uint64_t key_fingerprint = 0) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::size_t samples_ = 0;
    std::vector<cplx> cross_;
    std::vector<double> power_;
};

/// Each pair maps its watermarked image onto its inverse-message partner.
SpectralFilter train_spectral_filter(const PairedDataset& pairs, double ridge = 1.0);

/// Filters the luminance spectrum; chroma offsets are preserved.
RasterImage apply_spectral_filter(const RasterImage& img, const SpectralFilter& f);

// ---------------------------------------------------------------------------
// Regeneration: noise injection followed by wavelet denoising.

struct RegenConfig {
    double strength = 0.16;
    int passes = 1;
    double denoise_threshold_scale = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Orthonormal Haar soft-threshold denoiser on `levels` levels. Dimensions
/// must be multiples of 2^levels; the approximation band is left untouched.
Plane haar_soft_denoise(const Plane& p, double threshold, int levels = 2);

RasterImage regenerate(const RasterImage& img, const RegenConfig& cfg);

// ---------------------------------------------------------------------------
// Test-time refinement of the attacked image itself.

struct RefineConfig {
    int steps = 50;
    double step_size = 0.05;
    double ssim_weight = 0.5;
    double proximity_weight = 1.0;

    void validate() const;
};

/// MSE(x, x_w) + ssim_weight (1 - SSIM(x, x_w)) + proximity_weight MSE(x, x_att),
/// with MSE averaged over all RGB samples.
double refine_objective(const RasterImage& x, const RasterImage& x_att, const RasterImage& x_w,
                        const RefineConfig& cfg);

/// Gradient of refine_objective with respect to each RGB sample of x,
/// interleaved like RasterImage::data().
std::vector<double> refine_gradient(const RasterImage& x, const RasterImage& x_att, const RasterImage& x_w,
                                    const RefineConfig& cfg);

struct RefineResult {
    RasterImage image;
    /// Objective at the start and after every accepted step.
    std::vector<double> objective;
    int accepted_steps = 0;
};

RefineResult refine_traced(const RasterImage& x_att, const RasterImage& x_w, const RefineConfig& cfg = {});
RasterImage refine(const RasterImage& x_att, const RasterImage& x_w, const RefineConfig& cfg = {});

// ---------------------------------------------------------------------------
// CIELAB color and contrast transfer.

struct ColorTransferResult {
    RasterImage image;
    /// Set when the source lightness is flat and only chroma was transferred.
    bool contrast_skipped = false;
    /// Mean and std of L before conversion back to sRGB.
    double lightness_mean = 0.0;
    double lightness_std = 0.0;
};

/// Lightness from x_opt, chroma from x_w, lightness moments matched to x_w.
ColorTransferResult color_contrast_transfer(const RasterImage& x_opt, const RasterImage& x_w);

// ---------------------------------------------------------------------------
// Cluster-dispatch black-box pipeline.

enum class Route { Regenerate, LearnedFilter, RegenerateTranslate };

std::string to_string(Route r);
Route route_for(ClusterLabel label);

struct PipelineConfig {
    ClusterThresholds thresholds;
    double strong_strength = 0.16;  // no visible artifact
    double mild_strength = 0.04;    // square lattice, before translation
    int passes = 1;
    double denoise_threshold_scale = 2.0;
    int dx = 7;
    RefineConfig refine;
    // Learned stage: self-generated training pairs with the toolkit's own keys.
    std::size_t training_pairs = 200;
    double ridge = 1.0;
    /// Multiplier on the default amplitudes of the training keys.
    double training_amplitude_scale = 1.0;
    std::uint64_t training_seed = 0x7472;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct PipelineEntry {
    std::size_t index = 0;
    ArtifactScores scores;
    ClusterLabel label = ClusterLabel::NoArtifact;
    Route route = Route::Regenerate;
    bool ok = true;
    bool contrast_skipped = false;
    std::string error;
};

struct PipelineResult {
    std::vector<RasterImage> images;
    std::vector<PipelineEntry> manifest;

    std::string manifest_json() const;
};

/// Trains the learned-stage filter for one image size.
SpectralFilter train_pipeline_filter(int width, int height, const PipelineConfig& cfg);

/// Failed images are copied through unchanged and marked in the manifest.
/// Image i draws its randomness from item_seed(cfg.seed, ids[i]); ids
/// default to the positions 0..n-1.
PipelineResult blackbox_pipeline(const std::vector<RasterImage>& images, const PipelineConfig& cfg = {},
                                 const std::vector<std::uint64_t>& ids = {});

}  // namespace wmlab
