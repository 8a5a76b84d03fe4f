#include "wmlab/harness.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wmlab/corpus.h"
#include "wmlab/parallel.h"
#include "wmlab/png_io.h"
#include "wmlab/rng.h"

namespace wmlab {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kStreamCalibration = 0x43414c42;  // "CALB"
constexpr std::uint64_t kStreamMessage = 0x4d534753;      // "MSGS"

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ordered_json key_json(const WatermarkKey& k) { return ordered_json::parse(k.to_json()); }

WatermarkKey key_from(const nlohmann::json& j, WatermarkKey fallback, Family expected) {
    if (j.is_null()) return fallback;
    WatermarkKey k = WatermarkKey::from_json(j.dump());
    if (k.family != expected) throw Error("config: key has family " + to_string(k.family) + ", expected " +
                                          to_string(expected));
    return k;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

/// Family whose detector scores image `index` of the experiment.
Family detection_family(WatermarkSet set, std::size_t index) {
    switch (set) {
        case WatermarkSet::SpreadSpectrum:
        case WatermarkSet::Boundary: return Family::SpreadSpectrum;
        case WatermarkSet::FourierRing: return Family::FourierRing;
        case WatermarkSet::FourierSquare: return Family::FourierSquare;
        case WatermarkSet::Mixed: {
            static constexpr Family cycle[] = {Family::SpreadSpectrum, Family::SpreadSpectrum, Family::FourierRing,
                                               Family::FourierSquare};
            return cycle[index % 4];
        }
    }
    throw Error("unknown watermark set");
}

bool carries_frame(WatermarkSet set, std::size_t index) {
    return set == WatermarkSet::Boundary || (set == WatermarkSet::Mixed && index % 4 == 1);
}

}  // namespace

// ----- detection ------------------------------------------------------------

double Detector::distance(const RasterImage& img, const BitMessage* reference) const {
    switch (key.family) {
        case Family::SpreadSpectrum:
            if (!reference) throw Error("spread-spectrum distance needs a reference message");
            return ss_decode(img, key, bits, reference).distance;
        case Family::FourierRing:
        case Family::FourierSquare: return 1.0 - fourier_detect(img, key);
        case Family::BoundaryFrame: return 1.0 - boundary_detect(img, key);
    }
    throw Error("Detector: unknown family");
}

DetectionThreshold threshold_from_distances(std::vector<double> distances, double fpr) {
    if (distances.size() < 100) throw Error("calibrate_threshold: need at least 100 calibration images");
    if (!(fpr > 0.0 && fpr <= 1.0)) throw Error("calibrate_threshold: fpr must be in (0,1]");
    const std::size_t n = distances.size();
    std::sort(distances.begin(), distances.end());
    std::size_t k = std::max<std::size_t>(1, std::size_t(std::ceil(fpr * double(n) - 1e-9)));
    k = std::min(k, n);
    DetectionThreshold t;
    t.value = distances[k - 1];
    t.fpr_target = fpr;
    t.calibration_n = n;
    if (fpr * double(n) < 1.0) t.warning = "n * fpr < 1: threshold is the sample minimum";
    return t;
}

BitMessage calibration_reference(std::uint64_t seed, std::size_t index, std::size_t bits) {
    return BitMessage::random(rng::hash(seed, kStreamCalibration, index), bits);
}

namespace {

/// Distances for several detectors over one shared calibration corpus.
std::vector<std::vector<double>> calibration_distances_many(const std::vector<Detector>& dets, std::size_t n,
                                                            std::uint64_t seed, int size, unsigned threads) {
    std::vector<std::vector<double>> out(dets.size(), std::vector<double>(n));
    parallel_for(n, threads, [&](std::size_t i) {
        RasterImage cover = gen_cover(size, seed, i);
        for (std::size_t d = 0; d < dets.size(); ++d) {
            BitMessage ref = calibration_reference(seed, i, dets[d].bits);
            out[d][i] = dets[d].distance(cover, &ref);
        }
    });
    return out;
}

}  // namespace

std::vector<double> calibration_distances(const Detector& det, std::size_t n, std::uint64_t seed, int size,
                                          unsigned threads) {
    return calibration_distances_many({det}, n, seed, size, threads).front();
}

DetectionThreshold calibrate_threshold(const Detector& det, std::size_t n, double fpr, std::uint64_t seed, int size,
                                       unsigned threads) {
    if (n < 100) throw Error("calibrate_threshold: need at least 100 calibration images");
    auto t = threshold_from_distances(calibration_distances(det, n, seed, size, threads), fpr);
    t.detector_family = det.key.family;
    return t;
}

double detection_score(const std::vector<double>& distances, const DetectionThreshold& thr) {
    if (distances.empty()) throw Error("detection_score: empty image set");
    std::size_t flagged = std::count_if(distances.begin(), distances.end(), [&](double d) { return thr.flags(d); });
    return double(flagged) / double(distances.size());
}

double detection_score(const std::vector<RasterImage>& images, const Detector& det, const DetectionThreshold& thr,
                       const std::vector<BitMessage>& references) {
    if (images.empty()) throw Error("detection_score: empty image set");
    if (det.key.family == Family::SpreadSpectrum && references.size() != images.size())
        throw Error("detection_score: one reference message per image is required");
    std::vector<double> d(images.size());
    for (std::size_t i = 0; i < images.size(); ++i)
        d[i] = det.distance(images[i], references.empty() ? nullptr : &references[i]);
    return detection_score(d, thr);
}

// ----- configuration --------------------------------------------------------

std::string to_string(AttackMethod m) {
    switch (m) {
        case AttackMethod::Identity: return "identity";
        case AttackMethod::Translate: return "translate";
        case AttackMethod::Filter: return "filter";
        case AttackMethod::Regen: return "regen";
        case AttackMethod::Refine: return "refine";
        case AttackMethod::ColorTransfer: return "colorxfer";
        case AttackMethod::Auto: return "auto";
    }
    return "unknown";
}

AttackMethod attack_from_string(const std::string& s) {
    for (auto m : {AttackMethod::Identity, AttackMethod::Translate, AttackMethod::Filter, AttackMethod::Regen,
                   AttackMethod::Refine, AttackMethod::ColorTransfer, AttackMethod::Auto})
        if (to_string(m) == s) return m;
    throw Error("unknown attack method: " + s);
}

std::string to_string(WatermarkSet s) {
    switch (s) {
        case WatermarkSet::SpreadSpectrum: return "spread_spectrum";
        case WatermarkSet::Boundary: return "boundary";
        case WatermarkSet::FourierRing: return "fourier_ring";
        case WatermarkSet::FourierSquare: return "fourier_square";
        case WatermarkSet::Mixed: return "mixed";
    }
    return "unknown";
}

WatermarkSet watermark_set_from_string(const std::string& s) {
    for (auto w : {WatermarkSet::SpreadSpectrum, WatermarkSet::Boundary, WatermarkSet::FourierRing,
                   WatermarkSet::FourierSquare, WatermarkSet::Mixed})
        if (to_string(w) == s) return w;
    throw Error("unknown watermark set: " + s);
}

namespace {

ordered_json config_json(const ExperimentConfig& c, bool with_runtime) {
    ordered_json j;
    j["corpus_size"] = c.corpus_size;
    j["image_size"] = c.image_size;
    j["seed"] = c.seed;
    if (with_runtime) j["threads"] = c.threads;
    j["watermark"] = to_string(c.watermark);
    j["keys"] = {{"spread_spectrum", key_json(c.ss_key)},
                 {"fourier_ring", key_json(c.ring_key)},
                 {"fourier_square", key_json(c.square_key)},
                 {"boundary_frame", key_json(c.frame_key)}};
    j["message_bits"] = c.message_bits;
    const auto& p = c.pipeline;
    j["attack"] = {{"method", to_string(c.attack)}, {"dx", c.dx}, {"strength", c.strength},
                   {"passes", c.passes}, {"steps", c.steps}};
    j["pipeline"] = {{"thresholds", {p.thresholds.boundary, p.thresholds.ring, p.thresholds.square}},
                     {"strong_strength", p.strong_strength},
                     {"mild_strength", p.mild_strength},
                     {"passes", p.passes},
                     {"denoise_threshold_scale", p.denoise_threshold_scale},
                     {"dx", p.dx},
                     {"refine",
                      {{"steps", p.refine.steps},
                       {"step_size", p.refine.step_size},
                       {"ssim_weight", p.refine.ssim_weight},
                       {"proximity_weight", p.refine.proximity_weight}}},
                     {"training_pairs", p.training_pairs},
                     {"ridge", p.ridge},
                     {"training_amplitude_scale", p.training_amplitude_scale},
                     {"training_seed", p.training_seed}};
    j["calibration"] = {{"n", c.calibration_n}, {"fpr", c.fpr_target}, {"seed", c.calibration_seed}};
    j["quality"] = {{"weights", c.quality.weights},
                    {"psnr", {c.quality.psnr.best, c.quality.psnr.worst}},
                    {"ssim", {c.quality.ssim.best, c.quality.ssim.worst}},
                    {"nmi", {c.quality.nmi.best, c.quality.nmi.worst}}};
    if (with_runtime) j["output"] = {{"dir", c.output_dir}, {"spectrum_dumps", c.spectrum_dumps}};
    return j;
}

MetricRange range_from(const nlohmann::json& j, MetricRange fallback) {
    if (j.is_null()) return fallback;
    auto v = j.get<std::vector<double>>();
    if (v.size() != 2) throw Error("config: metric range must be [best, worst]");
    return {v[0], v[1]};
}

}  // namespace

std::string ExperimentConfig::to_json() const { return config_json(*this, true).dump(2); }

std::uint64_t ExperimentConfig::fingerprint() const { return fnv1a(config_json(*this, false).dump()); }

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw Error("config: top level must be an object");
    ExperimentConfig c;
    auto section = [&](const nlohmann::json& parent, const char* name) {
        return parent.contains(name) ? parent.at(name) : nlohmann::json::object();
    };
    auto opt = [](const nlohmann::json& o, const char* name) {
        return o.contains(name) ? o.at(name) : nlohmann::json();
    };
    try {
        c.corpus_size = j.value("corpus_size", c.corpus_size);
        c.image_size = j.value("image_size", c.image_size);
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        if (j.contains("watermark")) c.watermark = watermark_set_from_string(j.at("watermark").get<std::string>());
        auto keys = section(j, "keys");
        c.ss_key = key_from(opt(keys, "spread_spectrum"), c.ss_key, Family::SpreadSpectrum);
        c.ring_key = key_from(opt(keys, "fourier_ring"), c.ring_key, Family::FourierRing);
        c.square_key = key_from(opt(keys, "fourier_square"), c.square_key, Family::FourierSquare);
        c.frame_key = key_from(opt(keys, "boundary_frame"), c.frame_key, Family::BoundaryFrame);
        c.message_bits = j.value("message_bits", c.message_bits);

        auto a = section(j, "attack");
        if (a.contains("method")) c.attack = attack_from_string(a.at("method").get<std::string>());
        c.dx = a.value("dx", c.dx);
        c.strength = a.value("strength", c.strength);
        c.passes = a.value("passes", c.passes);
        c.steps = a.value("steps", c.steps);

        auto p = section(j, "pipeline");
        auto& pc = c.pipeline;
        if (p.contains("thresholds")) {
            auto t = p.at("thresholds").get<std::vector<double>>();
            if (t.size() != 3) throw Error("config: pipeline.thresholds must hold three values");
            pc.thresholds = {t[0], t[1], t[2]};
        }
        pc.strong_strength = p.value("strong_strength", pc.strong_strength);
        pc.mild_strength = p.value("mild_strength", pc.mild_strength);
        pc.passes = p.value("passes", pc.passes);
        pc.denoise_threshold_scale = p.value("denoise_threshold_scale", pc.denoise_threshold_scale);
        pc.dx = p.value("dx", pc.dx);
        auto r = section(p, "refine");
        pc.refine.steps = r.value("steps", pc.refine.steps);
        pc.refine.step_size = r.value("step_size", pc.refine.step_size);
        pc.refine.ssim_weight = r.value("ssim_weight", pc.refine.ssim_weight);
        pc.refine.proximity_weight = r.value("proximity_weight", pc.refine.proximity_weight);
        pc.training_pairs = p.value("training_pairs", pc.training_pairs);
        pc.ridge = p.value("ridge", pc.ridge);
        pc.training_amplitude_scale = p.value("training_amplitude_scale", pc.training_amplitude_scale);
        pc.training_seed = p.value("training_seed", pc.training_seed);

        auto cal = section(j, "calibration");
        c.calibration_n = cal.value("n", c.calibration_n);
        c.fpr_target = cal.value("fpr", c.fpr_target);
        c.calibration_seed = cal.value("seed", c.calibration_seed);

        auto q = section(j, "quality");
        if (q.contains("weights")) {
            auto w = q.at("weights").get<std::vector<double>>();
            if (w.size() != 3) throw Error("config: quality.weights must hold three values");
            c.quality.weights = {w[0], w[1], w[2]};
        }
        c.quality.psnr = range_from(opt(q, "psnr"), c.quality.psnr);
        c.quality.ssim = range_from(opt(q, "ssim"), c.quality.ssim);
        c.quality.nmi = range_from(opt(q, "nmi"), c.quality.nmi);

        auto o = section(j, "output");
        c.output_dir = o.value("dir", c.output_dir);
        c.spectrum_dumps = o.value("spectrum_dumps", c.spectrum_dumps);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return c;
}

// ----- report ---------------------------------------------------------------

std::string EvalReport::to_json() const {
    ordered_json j;
    j["detection_score"] = detection_score;
    j["quality"] = {{"psnr", quality.psnr}, {"ssim", quality.ssim}, {"nmi", quality.nmi}};
    j["quality_aggregate"] = quality_aggregate;
    j["total"] = total;
    j["partial"] = partial;
    j["config_fingerprint"] = hex64(config_fingerprint);
    j["seed"] = seed;
    j["metric_notes"] = {{"ssim", "luminance, Gaussian 11x11 window, sigma 1.5"},
                         {"nmi", "256-bin luminance histograms"},
                         {"psnr", "mean over RGB channels, capped at 100 dB"},
                         {"quality_reference", "watermarked input"}};
    j["quality_ranges"] = {{"weights", quality_config.weights},
                           {"psnr", {quality_config.psnr.best, quality_config.psnr.worst}},
                           {"ssim", {quality_config.ssim.best, quality_config.ssim.worst}},
                           {"nmi", {quality_config.nmi.best, quality_config.nmi.worst}}};
    auto& th = j["thresholds"] = ordered_json::array();
    for (const auto& t : thresholds) {
        ordered_json row = {{"family", to_string(t.detector_family)},
                            {"value", t.value},
                            {"fpr_target", t.fpr_target},
                            {"calibration_n", t.calibration_n}};
        if (!t.warning.empty()) row["warning"] = t.warning;
        th.push_back(std::move(row));
    }
    auto& rs = j["images"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row = {{"index", r.index}, {"watermark", r.watermark}};
        if (!r.cluster.empty()) row["cluster"] = r.cluster;
        row["ok"] = r.ok;
        if (r.ok) {
            row["distance"] = r.distance;
            row["flagged"] = r.flagged;
            row["psnr"] = r.quality.psnr;
            row["ssim"] = r.quality.ssim;
            row["nmi"] = r.quality.nmi;
        } else {
            row["error"] = r.error;
        }
        rs.push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

std::string EvalReport::to_csv() const {
    std::ostringstream s;
    s.precision(17);
    s << "index,watermark,cluster,ok,distance,flagged,psnr,ssim,nmi,error\n";
    for (const auto& r : rows) {
        s << r.index << ',' << r.watermark << ',' << r.cluster << ',' << (r.ok ? 1 : 0) << ',';
        if (r.ok)
            s << r.distance << ',' << (r.flagged ? 1 : 0) << ',' << r.quality.psnr << ',' << r.quality.ssim << ','
              << r.quality.nmi << ',';
        else
            s << ",,,,,";
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        s << err << '\n';
    }
    return s.str();
}

// ----- experiment -----------------------------------------------------------

EvalReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.corpus_size == 0) throw Error("experiment: corpus_size must be at least 1");
    cfg.quality.validate();
    const std::size_t n = cfg.corpus_size;
    const int size = cfg.image_size;

    auto detector_for = [&](Family f) -> Detector {
        switch (f) {
            case Family::SpreadSpectrum: return {cfg.ss_key, cfg.message_bits};
            case Family::FourierRing: return {cfg.ring_key, cfg.message_bits};
            case Family::FourierSquare: return {cfg.square_key, cfg.message_bits};
            case Family::BoundaryFrame: return {cfg.frame_key, cfg.message_bits};
        }
        throw Error("unknown family");
    };

    // Detectors in use, calibrated together on one fresh corpus.
    std::vector<Family> families;
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 4); ++i) {
        Family f = detection_family(cfg.watermark, i);
        if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
    }
    std::sort(families.begin(), families.end());
    std::vector<Detector> detectors;
    for (Family f : families) detectors.push_back(detector_for(f));
    if (cfg.calibration_n < 100) throw Error("calibrate_threshold: need at least 100 calibration images");
    auto cal = calibration_distances_many(detectors, cfg.calibration_n, cfg.calibration_seed, size, cfg.threads);

    EvalReport report;
    report.seed = cfg.seed;
    report.config_fingerprint = cfg.fingerprint();
    report.quality_config = cfg.quality;
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        auto t = threshold_from_distances(std::move(cal[d]), cfg.fpr_target);
        t.detector_family = families[d];
        report.thresholds.push_back(t);
    }
    auto threshold_for = [&](Family f) -> const DetectionThreshold& {
        for (const auto& t : report.thresholds)
            if (t.detector_family == f) return t;
        throw Error("no threshold for family");
    };

    // Corpus and watermarking.
    std::vector<RasterImage> marked(n);
    std::vector<BitMessage> messages(n);
    report.rows.resize(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        auto& row = report.rows[i];
        row.index = i;
        Family f = detection_family(cfg.watermark, i);
        row.watermark = carries_frame(cfg.watermark, i) ? "spread_spectrum+boundary_frame" : to_string(f);
        try {
            RasterImage x = gen_cover(size, cfg.seed, i);
            messages[i] = BitMessage::random(rng::hash(cfg.seed, kStreamMessage, i), cfg.message_bits);
            x = embed(x, detector_for(f).key, &messages[i]);
            if (carries_frame(cfg.watermark, i)) x = boundary_embed(x, cfg.frame_key);
            marked[i] = std::move(x);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });

    // Attack.
    std::vector<RasterImage> attacked(n);
    PipelineConfig pc = cfg.pipeline;
    pc.seed = cfg.seed;
    pc.threads = cfg.threads;
    if (cfg.attack == AttackMethod::Auto) {
        std::vector<std::size_t> live;
        std::vector<RasterImage> batch;
        for (std::size_t i = 0; i < n; ++i)
            if (report.rows[i].ok) {
                live.push_back(i);
                batch.push_back(marked[i]);
            }
        // Per-image seeds follow the corpus index, not the batch position.
        std::vector<std::uint64_t> ids(live.begin(), live.end());
        PipelineResult res = blackbox_pipeline(batch, pc, ids);
        for (std::size_t b = 0; b < live.size(); ++b) {
            std::size_t i = live[b];
            attacked[i] = std::move(res.images[b]);
            const auto& e = res.manifest[b];
            report.rows[i].cluster = to_string(e.label);
            if (!e.ok) {
                report.rows[i].ok = false;
                report.rows[i].error = e.error;
            }
        }
        if (!cfg.output_dir.empty()) {
            std::filesystem::create_directories(cfg.output_dir);
            write_text(std::filesystem::path(cfg.output_dir) / "manifest.json", res.manifest_json() + "\n");
        }
    } else {
        SpectralFilter filter;
        bool needs_filter = cfg.attack == AttackMethod::Filter || cfg.attack == AttackMethod::Refine ||
                            cfg.attack == AttackMethod::ColorTransfer;
        if (needs_filter) filter = train_pipeline_filter(size, size, pc);
        RefineConfig rc = pc.refine;
        rc.steps = cfg.steps;
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            auto& row = report.rows[i];
            if (!row.ok) return;
            try {
                const RasterImage& x = marked[i];
                switch (cfg.attack) {
                    case AttackMethod::Identity: attacked[i] = x; break;
                    case AttackMethod::Translate: attacked[i] = translation_attack(x, cfg.dx); break;
                    case AttackMethod::Regen:
                        attacked[i] = regenerate(x, {cfg.strength, cfg.passes, pc.denoise_threshold_scale,
                                                     rng::item_seed(cfg.seed, i)});
                        break;
                    case AttackMethod::Filter: attacked[i] = apply_spectral_filter(x, filter); break;
                    case AttackMethod::Refine: attacked[i] = refine(apply_spectral_filter(x, filter), x, rc); break;
                    case AttackMethod::ColorTransfer:
                        attacked[i] = color_contrast_transfer(refine(apply_spectral_filter(x, filter), x, rc), x).image;
                        break;
                    case AttackMethod::Auto: break;
                }
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        });
    }

    // Scoring.
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        auto& row = report.rows[i];
        if (!row.ok) return;
        try {
            Family f = detection_family(cfg.watermark, i);
            row.distance = detector_for(f).distance(attacked[i], &messages[i]);
            row.flagged = threshold_for(f).flags(row.distance);
            row.quality = measure_quality(marked[i], attacked[i]);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });

    // Serial, index-ordered aggregation keeps reports thread-count independent.
    std::size_t good = 0, flagged = 0;
    QualityVector sum{0.0, 0.0, 0.0};
    for (const auto& r : report.rows) {
        if (!r.ok) {
            report.partial = true;
            continue;
        }
        ++good;
        flagged += r.flagged ? 1 : 0;
        sum.psnr += r.quality.psnr;
        sum.ssim += r.quality.ssim;
        sum.nmi += r.quality.nmi;
    }
    if (good > 0) {
        report.detection_score = double(flagged) / double(good);
        report.quality = {sum.psnr / good, sum.ssim / good, sum.nmi / good};
    }
    report.quality_aggregate = quality_aggregate(report.quality, cfg.quality);
    report.total = total_score(report.detection_score, report.quality_aggregate);

    if (!cfg.output_dir.empty()) {
        std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        write_text(dir / "report.json", report.to_json());
        write_text(dir / "report.csv", report.to_csv());
        for (std::size_t i = 0; i < std::min(cfg.spectrum_dumps, n); ++i) {
            if (!report.rows[i].ok) continue;
            std::string stem = "spectrum_" + std::to_string(i);
            write_png_plane((dir / (stem + "_watermarked.png")).string(), centered_log_magnitude(fft2(marked[i])));
            write_png_plane((dir / (stem + "_attacked.png")).string(), centered_log_magnitude(fft2(attacked[i])));
        }
    }
    return report;
}

}  // namespace wmlab
