#include "wmlab/attacks.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <json.hpp>

#include "wmlab/color.h"
#include "wmlab/corpus.h"
#include "wmlab/metrics.h"
#include "wmlab/parallel.h"
#include "wmlab/rng.h"

namespace wmlab {

namespace {

constexpr std::uint64_t kStreamRegen = 0x5245474e;  // "REGN"

// ----- Haar ----------------------------------------------------------------

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// One analysis level on the top-left h x w block (rows, then columns).
void haar_step(Plane& p, int h, int w) {
    std::vector<double> tmp(std::max(h, w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w / 2; ++x) {
            double a = p(y, 2 * x), b = p(y, 2 * x + 1);
            tmp[x] = (a + b) * kInvSqrt2;
            tmp[w / 2 + x] = (a - b) * kInvSqrt2;
        }
        for (int x = 0; x < w; ++x) p(y, x) = tmp[x];
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h / 2; ++y) {
            double a = p(2 * y, x), b = p(2 * y + 1, x);
            tmp[y] = (a + b) * kInvSqrt2;
            tmp[h / 2 + y] = (a - b) * kInvSqrt2;
        }
        for (int y = 0; y < h; ++y) p(y, x) = tmp[y];
    }
}

void haar_unstep(Plane& p, int h, int w) {
    std::vector<double> tmp(std::max(h, w));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h / 2; ++y) {
            double s = p(y, x), d = p(h / 2 + y, x);
            tmp[2 * y] = (s + d) * kInvSqrt2;
            tmp[2 * y + 1] = (s - d) * kInvSqrt2;
        }
        for (int y = 0; y < h; ++y) p(y, x) = tmp[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w / 2; ++x) {
            double s = p(y, x), d = p(y, w / 2 + x);
            tmp[2 * x] = (s + d) * kInvSqrt2;
            tmp[2 * x + 1] = (s - d) * kInvSqrt2;
        }
        for (int x = 0; x < w; ++x) p(y, x) = tmp[x];
    }
}

double soft(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

/// Edge-replicating pad up to multiples of m.
Plane pad_to_multiple(const Plane& p, int m) {
    int h = (p.height + m - 1) / m * m, w = (p.width + m - 1) / m * m;
    if (h == p.height && w == p.width) return p;
    Plane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out(y, x) = p(std::min(y, p.height - 1), std::min(x, p.width - 1));
    return out;
}

Plane crop(const Plane& p, int width, int height) {
    if (p.width == width && p.height == height) return p;
    Plane out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) out(y, x) = p(y, x);
    return out;
}

RasterImage crop(const RasterImage& img, int width, int height) {
    if (img.width() == width && img.height() == height) return img;
    RasterImage out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, x, c);
    return out;
}

Plane channel(const RasterImage& img, int c) {
    Plane p(img.width(), img.height());
    auto d = img.data();
    for (std::size_t i = 0; i < p.size(); ++i) p.v[i] = d[3 * i + c];
    return p;
}

double mean_squared_distance(const RasterImage& a, const RasterImage& b) {
    auto da = a.data(), db = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        double d = da[i] - db[i];
        s += d * d;
    }
    return s / double(da.size());
}

}  // namespace

// ----- translation ---------------------------------------------------------

RasterImage translation_attack(const RasterImage& x_w, int dx) {
    return restore_left_columns(translate_right(x_w, dx), x_w, dx);
}

// ----- spectral filter -----------------------------------------------------

SpectralFilter SpectralFilter::identity(int width, int height) {
    SpectralFilter f;
    f.width = width;
    f.height = height;
    f.gains.assign(std::size_t(width) * height, cplx(1.0, 0.0));
    return f;
}

void FilterTrainer::add(const RasterImage& input, const RasterImage& target) {
    require_same_shape(input, target, "FilterTrainer::add");
    if (samples_ == 0) {
        width_ = input.width();
        height_ = input.height();
        cross_.assign(std::size_t(width_) * height_, cplx{});
        power_.assign(cross_.size(), 0.0);
    } else if (input.width() != width_ || input.height() != height_) {
        throw Error("FilterTrainer::add: all training images must share one size");
    }
    Spectrum xw = fft2(input), xi = fft2(target);
    for (std::size_t k = 0; k < cross_.size(); ++k) {
        cross_[k] += std::conj(xw.coeffs[k]) * xi.coeffs[k];
        power_[k] += std::norm(xw.coeffs[k]);
    }
    ++samples_;
}

void FilterTrainer::add(const PairedDataset& pairs) {
    for (const auto& p : pairs.pairs) add(p.watermarked, p.inverse);
}

SpectralFilter FilterTrainer::finish(double ridge, std::uint64_t key_fingerprint) const {
    if (samples_ == 0) throw Error("train_spectral_filter: empty training set");
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw Error("train_spectral_filter: ridge must be >= 0");
    SpectralFilter f;
    f.width = width_;
    f.height = height_;
    f.ridge = ridge;
    f.key_fingerprint = key_fingerprint;
    f.gains.resize(cross_.size());
    for (std::size_t k = 0; k < cross_.size(); ++k) {
        double den = power_[k] + ridge;
        f.gains[k] = den > 0.0 ? (cross_[k] + ridge) / den : cplx(1.0, 0.0);
    }
    return f;
}

SpectralFilter train_spectral_filter(const PairedDataset& pairs, double ridge) {
    if (pairs.pairs.empty()) throw Error("train_spectral_filter: empty training set");
    FilterTrainer t;
    t.add(pairs);
    return t.finish(ridge, pairs.key.fingerprint());
}

RasterImage apply_spectral_filter(const RasterImage& img, const SpectralFilter& f) {
    if (img.width() != f.width || img.height() != f.height)
        throw Error("apply_spectral_filter: filter size does not match the image");
    Spectrum s = fft2(img);
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= f.gains[k];
    return replace_luminance(img, ifft2(s));
}

// ----- regeneration --------------------------------------------------------

void RegenConfig::validate() const {
    if (!(strength >= 0.0 && strength <= 1.0)) throw Error("RegenConfig: strength must be in [0,1]");
    if (passes < 1) throw Error("RegenConfig: passes must be at least 1");
    if (!(denoise_threshold_scale > 0.0)) throw Error("RegenConfig: denoise_threshold_scale must be positive");
}

Plane haar_soft_denoise(const Plane& p, double threshold, int levels) {
    const int m = 1 << levels;
    if (p.width % m != 0 || p.height % m != 0)
        throw Error("haar_soft_denoise: dimensions must be multiples of 2^levels");
    Plane c = p;
    int h = p.height, w = p.width;
    for (int l = 0; l < levels; ++l, h /= 2, w /= 2) haar_step(c, h, w);
    // (h, w) now bound the approximation band.
    for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x)
            if (y >= h || x >= w) c(y, x) = soft(c(y, x), threshold);
    for (int l = levels - 1; l >= 0; --l) haar_unstep(c, p.height >> l, p.width >> l);
    return c;
}

RasterImage regenerate(const RasterImage& img, const RegenConfig& cfg) {
    cfg.validate();
    if (cfg.strength == 0.0) return img;
    const double s = cfg.strength;
    const double keep = std::sqrt(1.0 - s), noise = std::sqrt(s);
    const double tau = cfg.denoise_threshold_scale * noise;
    const int w = img.width(), h = img.height();
    RasterImage x = img;
    for (int pass = 0; pass < cfg.passes; ++pass) {
        std::vector<double> out(x.data().begin(), x.data().end());
        for (int c = 0; c < 3; ++c) {
            Plane p = channel(x, c);
            for (std::size_t i = 0; i < p.size(); ++i)
                p.v[i] = keep * p.v[i] + noise * rng::normal(cfg.seed, kStreamRegen + pass, 3 * i + c);
            Plane d = crop(haar_soft_denoise(pad_to_multiple(p, 4), tau, 2), w, h);
            // At s = 1 nothing of the input survives to rescale.
            const double gain = keep > 0.0 ? 1.0 / keep : 1.0;
            for (std::size_t i = 0; i < d.size(); ++i) out[3 * i + c] = gain * d.v[i];
        }
        x = RasterImage(w, h, std::move(out));
    }
    return x;
}

// ----- refinement ----------------------------------------------------------

void RefineConfig::validate() const {
    if (steps < 1 || !(step_size > 0.0) || !(ssim_weight > 0.0) || !(proximity_weight > 0.0))
        throw Error("RefineConfig: all parameters must be positive");
}

double refine_objective(const RasterImage& x, const RasterImage& x_att, const RasterImage& x_w,
                        const RefineConfig& cfg) {
    require_same_shape(x, x_w, "refine");
    require_same_shape(x, x_att, "refine");
    return mean_squared_distance(x, x_w) + cfg.ssim_weight * (1.0 - ssim(x, x_w)) +
           cfg.proximity_weight * mean_squared_distance(x, x_att);
}

std::vector<double> refine_gradient(const RasterImage& x, const RasterImage& x_att, const RasterImage& x_w,
                                    const RefineConfig& cfg) {
    require_same_shape(x, x_w, "refine");
    require_same_shape(x, x_att, "refine");
    Plane gs = ssim_grad(x, x_w);
    auto dx = x.data(), dw = x_w.data(), da = x_att.data();
    const double luma[3] = {kLumaR, kLumaG, kLumaB};
    const double inv_n = 1.0 / double(dx.size());
    std::vector<double> g(dx.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = 2.0 * inv_n * ((dx[i] - dw[i]) + cfg.proximity_weight * (dx[i] - da[i])) -
               cfg.ssim_weight * luma[i % 3] * gs.v[i / 3];
    return g;
}

RefineResult refine_traced(const RasterImage& x_att, const RasterImage& x_w, const RefineConfig& cfg) {
    cfg.validate();
    RefineResult r{x_att, {}, 0};
    double f = refine_objective(r.image, x_att, x_w, cfg);
    r.objective.push_back(f);
    for (int t = 0; t < cfg.steps; ++t) {
        auto g = refine_gradient(r.image, x_att, x_w, cfg);
        bool accepted = false;
        double eta = cfg.step_size;
        for (int halving = 0; halving <= 5; ++halving, eta *= 0.5) {
            std::vector<double> next(g.size());
            auto cur = r.image.data();
            for (std::size_t i = 0; i < g.size(); ++i) next[i] = cur[i] - eta * g[i];
            RasterImage candidate(x_att.width(), x_att.height(), std::move(next));  // clamps
            double fc = refine_objective(candidate, x_att, x_w, cfg);
            if (fc <= f) {
                r.image = std::move(candidate);
                f = fc;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        r.objective.push_back(f);
        ++r.accepted_steps;
    }
    return r;
}

RasterImage refine(const RasterImage& x_att, const RasterImage& x_w, const RefineConfig& cfg) {
    return refine_traced(x_att, x_w, cfg).image;
}

// ----- color and contrast transfer -----------------------------------------

ColorTransferResult color_contrast_transfer(const RasterImage& x_opt, const RasterImage& x_w) {
    require_same_shape(x_opt, x_w, "color_contrast_transfer");
    LabImage opt = srgb_to_lab(x_opt);
    LabImage ref = srgb_to_lab(x_w);
    ChannelStats c = plane_stats(opt.L), w = plane_stats(ref.L);
    ColorTransferResult r;
    LabImage out{opt.L, ref.a, ref.b};
    if (c.std <= 1e-6) {
        r.contrast_skipped = true;
    } else {
        const double gain = w.std / c.std;
        for (double& v : out.L.v) v = gain * (v - c.mean) + w.mean;
    }
    ChannelStats f = plane_stats(out.L);
    r.lightness_mean = f.mean;
    r.lightness_std = f.std;
    r.image = lab_to_srgb(out);
    return r;
}

// ----- pipeline ------------------------------------------------------------

std::string to_string(Route r) {
    switch (r) {
        case Route::Regenerate: return "regenerate";
        case Route::LearnedFilter: return "learned_filter";
        case Route::RegenerateTranslate: return "regenerate_translate";
    }
    return "unknown";
}

Route route_for(ClusterLabel label) {
    switch (label) {
        case ClusterLabel::NoArtifact: return Route::Regenerate;
        case ClusterLabel::Boundary:
        case ClusterLabel::FourierRing: return Route::LearnedFilter;
        case ClusterLabel::FourierSquare: return Route::RegenerateTranslate;
    }
    throw Error("route_for: unknown label");
}

SpectralFilter train_pipeline_filter(int width, int height, const PipelineConfig& cfg) {
    const int side = std::max({width, height, 16});
    auto covers = gen_corpus(cfg.training_pairs, side, cfg.training_seed, cfg.threads);
    for (auto& c : covers) c = crop(c, width, height);
    auto ss_key = WatermarkKey::spread_spectrum(cfg.training_seed, 0.02 * cfg.training_amplitude_scale);
    auto ring_key = WatermarkKey::fourier_ring(cfg.training_seed + 1, 0.015 * cfg.training_amplitude_scale);
    FilterTrainer t;
    if (width >= 64 && height >= 64)
        t.add(make_paired_dataset(covers, ss_key, covers.size(), cfg.training_seed));
    t.add(make_paired_dataset(covers, ring_key, covers.size(), cfg.training_seed));
    return t.finish(cfg.ridge, ss_key.fingerprint() ^ ring_key.fingerprint());
}

std::string PipelineResult::manifest_json() const {
    nlohmann::ordered_json j;
    j["count"] = manifest.size();
    std::map<std::string, int> counts;
    auto& rows = j["images"] = nlohmann::ordered_json::array();
    for (const auto& e : manifest) {
        ++counts[to_string(e.label)];
        nlohmann::ordered_json row;
        row["index"] = e.index;
        row["cluster"] = to_string(e.label);
        row["route"] = to_string(e.route);
        row["scores"] = {{"boundary", e.scores.boundary}, {"ring", e.scores.ring}, {"square", e.scores.square}};
        row["ok"] = e.ok;
        if (e.contrast_skipped) row["contrast_skipped"] = true;
        if (!e.ok) row["error"] = e.error;
        rows.push_back(std::move(row));
    }
    j["clusters"] = counts;
    return j.dump(2);
}

PipelineResult blackbox_pipeline(const std::vector<RasterImage>& images, const PipelineConfig& cfg,
                                 const std::vector<std::uint64_t>& ids) {
    PipelineResult r;
    const std::size_t n = images.size();
    if (!ids.empty() && ids.size() != n) throw Error("blackbox_pipeline: one id per image is required");
    r.images.resize(n);
    r.manifest.resize(n);

    parallel_for(n, cfg.threads, [&](std::size_t i) {
        auto& e = r.manifest[i];
        e.index = ids.empty() ? i : ids[i];
        try {
            e.scores = artifact_scores(images[i]);
            e.label = classify_cluster(e.scores, cfg.thresholds);
            e.route = route_for(e.label);
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
        }
    });

    // One learned filter per image size, trained before the parallel stage.
    std::map<std::pair<int, int>, SpectralFilter> filters;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = r.manifest[i];
        auto size = std::make_pair(images[i].width(), images[i].height());
        if (e.ok && e.route == Route::LearnedFilter && !filters.count(size)) {
            try {
                filters.emplace(size, train_pipeline_filter(size.first, size.second, cfg));
            } catch (const std::exception&) {
                // Left absent; the affected images report the failure below.
            }
        }
    }

    parallel_for(n, cfg.threads, [&](std::size_t i) {
        auto& e = r.manifest[i];
        const RasterImage& x = images[i];
        r.images[i] = x;
        if (!e.ok) return;
        try {
            RegenConfig regen{cfg.strong_strength, cfg.passes, cfg.denoise_threshold_scale,
                              rng::item_seed(cfg.seed, e.index)};
            switch (e.route) {
                case Route::Regenerate: r.images[i] = regenerate(x, regen); break;
                case Route::LearnedFilter: {
                    auto it = filters.find({x.width(), x.height()});
                    if (it == filters.end()) throw Error("no learned filter could be trained for this size");
                    RasterImage x_att = apply_spectral_filter(x, it->second);
                    RasterImage x_opt = refine(x_att, x, cfg.refine);
                    auto ct = color_contrast_transfer(x_opt, x);
                    e.contrast_skipped = ct.contrast_skipped;
                    r.images[i] = std::move(ct.image);
                    break;
                }
                case Route::RegenerateTranslate: {
                    regen.strength = cfg.mild_strength;
                    RasterImage x_d = regenerate(x, regen);
                    r.images[i] = restore_left_columns(translate_right(x_d, cfg.dx), x, cfg.dx);
                    break;
                }
            }
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
            r.images[i] = x;
        }
    });
    return r;
}

}  // namespace wmlab
