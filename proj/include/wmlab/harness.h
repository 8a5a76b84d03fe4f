#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmlab/attacks.h"
#include "wmlab/metrics.h"
#include "wmlab/watermark.h"

namespace wmlab {

/// Distance-space view of a watermark detector: lower means "watermark
/// present". Spread spectrum: Hamming distance to a reference message;
/// Fourier families: 1 - rho; boundary frame: 1 - frame correlation.
struct Detector {
    WatermarkKey key;
    std::size_t bits = 100;

    double distance(const RasterImage& img, const BitMessage* reference = nullptr) const;
};

struct DetectionThreshold {
    double value = 0.0;
    double fpr_target = 0.001;
    std::size_t calibration_n = 10000;
    Family detector_family = Family::SpreadSpectrum;
    /// Non-empty when n * fpr < 1 (the quantile is the sample minimum).
    std::string warning;

    bool flags(double distance) const { return distance < value; }
};

/// k-th smallest distance with k = max(1, ceil(fpr * n)): fewer than fpr * n
/// calibration samples fall strictly below it.
DetectionThreshold threshold_from_distances(std::vector<double> distances, double fpr);

/// Reference message used for image `index` when scoring unwatermarked
/// images with a spread-spectrum detector.
BitMessage calibration_reference(std::uint64_t seed, std::size_t index, std::size_t bits);

/// Distances of `det` on n fresh procedural covers (size x size, corpus seed
/// `seed`). Spread-spectrum references come from calibration_reference.
std::vector<double> calibration_distances(const Detector& det, std::size_t n, std::uint64_t seed, int size = 128,
                                          unsigned threads = 0);

DetectionThreshold calibrate_threshold(const Detector& det, std::size_t n = 10000, double fpr = 0.001,
                                       std::uint64_t seed = 0, int size = 128, unsigned threads = 0);

/// Fraction of distances below the threshold.
double detection_score(const std::vector<double>& distances, const DetectionThreshold& thr);

/// Scores images against their reference messages (ignored unless the
/// detector is spread spectrum; may be empty then).
double detection_score(const std::vector<RasterImage>& images, const Detector& det,
                       const DetectionThreshold& thr, const std::vector<BitMessage>& references = {});

// ---------------------------------------------------------------------------

enum class AttackMethod { Identity, Translate, Filter, Regen, Refine, ColorTransfer, Auto };

std::string to_string(AttackMethod m);
AttackMethod attack_from_string(const std::string& s);

/// Which watermark the experiment corpus carries. Mixed cycles through
/// spread spectrum, spread spectrum + boundary frame, Fourier ring and
/// Fourier square by image index.
enum class WatermarkSet { SpreadSpectrum, Boundary, FourierRing, FourierSquare, Mixed };

std::string to_string(WatermarkSet s);
WatermarkSet watermark_set_from_string(const std::string& s);

struct ExperimentConfig {
    std::size_t corpus_size = 200;
    int image_size = 128;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    WatermarkSet watermark = WatermarkSet::Mixed;
    WatermarkKey ss_key = WatermarkKey::spread_spectrum(0x5353);
    WatermarkKey ring_key = WatermarkKey::fourier_ring(0x524e);
    WatermarkKey square_key = WatermarkKey::fourier_square(0x5351);
    WatermarkKey frame_key = WatermarkKey::boundary_frame(0x4246);
    std::size_t message_bits = 100;

    AttackMethod attack = AttackMethod::Auto;
    int dx = 7;
    double strength = 0.16;
    int passes = 1;
    int steps = 50;
    PipelineConfig pipeline;

    std::size_t calibration_n = 10000;
    double fpr_target = 0.001;
    std::uint64_t calibration_seed = 0xca11b;

    QualityConfig quality;

    std::string output_dir;       // empty: no files written
    std::size_t spectrum_dumps = 0;  // number of attacked images whose spectra are dumped

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    /// Digest of the canonical JSON form.
    std::uint64_t fingerprint() const;
};

struct ImageRow {
    std::size_t index = 0;
    std::string watermark;  // family used for detection
    std::string cluster;    // Auto attack only
    double distance = 0.0;
    bool flagged = false;
    QualityVector quality;
    bool ok = true;
    std::string error;
};

struct EvalReport {
    double detection_score = 0.0;
    QualityVector quality;  // mean over successful images
    double quality_aggregate = 0.0;
    double total = 0.0;
    bool partial = false;
    std::uint64_t config_fingerprint = 0;
    std::uint64_t seed = 0;
    std::vector<DetectionThreshold> thresholds;
    QualityConfig quality_config;
    std::vector<ImageRow> rows;

    std::string to_json() const;
    std::string to_csv() const;
};

/// Corpus, embedding, attack, detection and quality scoring. Output files
/// (report.json, report.csv, optional manifest and spectra) go to
/// cfg.output_dir when set. Reports are byte-identical for any thread count.
EvalReport run_experiment(const ExperimentConfig& cfg);

}  // namespace wmlab
