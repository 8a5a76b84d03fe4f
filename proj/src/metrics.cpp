#include "wmlab/metrics.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wmlab {

namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kSsimWindow> gaussian_window() {
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        double d = i - kSsimWindow / 2;
        w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

const std::array<double, kSsimWindow>& window() {
    static const auto w = gaussian_window();
    return w;
}

/// Separable "valid" filtering: output is (H-10) x (W-10).
Plane filter_valid(const Plane& in) {
    const auto& w = window();
    int oh = in.height - kSsimWindow + 1, ow = in.width - kSsimWindow + 1;
    Plane tmp(ow, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += w[k] * in(y, x + k);
            tmp(y, x) = s;
        }
    Plane out(ow, oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += w[k] * tmp(y + k, x);
            out(y, x) = s;
        }
    return out;
}

/// Adjoint of filter_valid: scatters a (H-10) x (W-10) map back to H x W.
Plane filter_adjoint(const Plane& in, int width, int height) {
    const auto& w = window();
    Plane tmp(in.width, height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x)
            for (int k = 0; k < kSsimWindow; ++k) tmp(y + k, x) += w[k] * in(y, x);
    Plane out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < in.width; ++x)
            for (int k = 0; k < kSsimWindow; ++k) out(y, x + k) += w[k] * tmp(y, x);
    return out;
}

Plane product(const Plane& a, const Plane& b) {
    Plane out(a.width, a.height);
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

struct SsimMaps {
    Plane mu_a, mu_b, var_a, var_b, cov;
};

void check_planes(const Plane& a, const Plane& b) {
    if (a.width != b.width || a.height != b.height) throw Error("ssim: image dimensions differ");
    if (a.width < kSsimWindow || a.height < kSsimWindow)
        throw Error("ssim: images must be at least 11x11");
}

SsimMaps local_moments(const Plane& a, const Plane& b) {
    SsimMaps m{filter_valid(a), filter_valid(b), filter_valid(product(a, a)), filter_valid(product(b, b)),
               filter_valid(product(a, b))};
    for (std::size_t i = 0; i < m.mu_a.size(); ++i) {
        m.var_a.v[i] -= m.mu_a.v[i] * m.mu_a.v[i];
        m.var_b.v[i] -= m.mu_b.v[i] * m.mu_b.v[i];
        m.cov.v[i] -= m.mu_a.v[i] * m.mu_b.v[i];
    }
    return m;
}

double entropy(std::vector<double> counts, double total) {
    std::sort(counts.begin(), counts.end());
    double h = 0.0;
    for (double c : counts) {
        double p = c / total;
        h -= p * std::log(p);
    }
    return h;
}

int hist_bin(double v) { return std::clamp(int(v * 256.0), 0, 255); }

}  // namespace

double psnr(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b, "psnr");
    std::array<double, 3> se{};
    auto da = a.data(), db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        double d = da[i] - db[i];
        se[i % 3] += d * d;
    }
    double total = 0.0;
    for (double s : se) {
        double mse = s / double(a.pixel_count());
        total += mse > 0.0 ? std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse)) : kPsnrCap;
    }
    return total / 3.0;
}

double ssim(const Plane& a, const Plane& b) {
    check_planes(a, b);
    SsimMaps m = local_moments(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.mu_a.size(); ++i) {
        double ma = m.mu_a.v[i], mb = m.mu_b.v[i];
        double num = (2 * ma * mb + kC1) * (2 * m.cov.v[i] + kC2);
        double den = (ma * ma + mb * mb + kC1) * (m.var_a.v[i] + m.var_b.v[i] + kC2);
        sum += num / den;
    }
    return sum / double(m.mu_a.size());
}

double ssim(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b, "ssim");
    return ssim(luminance(a), luminance(b));
}

Plane ssim_grad(const Plane& a, const Plane& b) {
    check_planes(a, b);
    SsimMaps m = local_moments(a, b);
    // For window q with S = A1*A2/(B1*B2):
    //   dS/da_p = w(p-q) * [alpha(q) + beta(q)*a_p + gamma(q)*b_p]
    Plane alpha(m.mu_a.width, m.mu_a.height), beta = alpha, gamma = alpha;
    const double inv_m = 1.0 / double(m.mu_a.size());
    for (std::size_t i = 0; i < m.mu_a.size(); ++i) {
        double ma = m.mu_a.v[i], mb = m.mu_b.v[i];
        double A1 = 2 * ma * mb + kC1, A2 = 2 * m.cov.v[i] + kC2;
        double B1 = ma * ma + mb * mb + kC1, B2 = m.var_a.v[i] + m.var_b.v[i] + kC2;
        double S = A1 * A2 / (B1 * B2);
        alpha.v[i] = inv_m * S * (2 * mb / A1 - 2 * ma / B1 + 2 * ma / B2 - 2 * mb / A2);
        beta.v[i] = inv_m * S * (-2.0 / B2);
        gamma.v[i] = inv_m * S * (2.0 / A2);
    }
    Plane ga = filter_adjoint(alpha, a.width, a.height);
    Plane gb = filter_adjoint(beta, a.width, a.height);
    Plane gc = filter_adjoint(gamma, a.width, a.height);
    Plane out(a.width, a.height);
    for (std::size_t p = 0; p < out.size(); ++p) out.v[p] = ga.v[p] + gb.v[p] * a.v[p] + gc.v[p] * b.v[p];
    return out;
}

Plane ssim_grad(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b, "ssim_grad");
    return ssim_grad(luminance(a), luminance(b));
}

double nmi(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b, "nmi");
    Plane la = luminance(a), lb = luminance(b);
    std::vector<double> ha(256, 0.0), hb(256, 0.0), joint(256 * 256, 0.0);
    for (std::size_t i = 0; i < la.size(); ++i) {
        int ia = hist_bin(la.v[i]), ib = hist_bin(lb.v[i]);
        ha[ia] += 1;
        hb[ib] += 1;
        joint[std::size_t(ia) * 256 + ib] += 1;
    }
    auto nonzero = [](const std::vector<double>& v) {
        std::vector<double> out;
        for (double c : v)
            if (c > 0) out.push_back(c);
        return out;
    };
    double n = double(la.size());
    double h_a = entropy(nonzero(ha), n);
    double h_b = entropy(nonzero(hb), n);
    double h_ab = entropy(nonzero(joint), n);
    double denom = h_a + h_b;
    if (denom <= 0.0) return 1.0;  // both constant
    double mi = denom - h_ab;
    return std::clamp(2.0 * mi / denom, 0.0, 1.0);
}

QualityVector measure_quality(const RasterImage& reference, const RasterImage& test) {
    return {psnr(reference, test), ssim(reference, test), nmi(reference, test)};
}

void QualityConfig::validate() const {
    double s = weights[0] + weights[1] + weights[2];
    if (std::abs(s - 1.0) > 1e-9) throw Error("QualityConfig: weights must sum to 1");
    for (const auto* r : {&psnr, &ssim, &nmi})
        if (r->best == r->worst) throw Error("QualityConfig: best and worst must differ");
}

double quality_aggregate(const QualityVector& q, const QualityConfig& cfg) {
    cfg.validate();
    auto degrade = [](double value, MetricRange r) {
        return std::clamp((r.best - value) / (r.best - r.worst), 0.0, 1.0);
    };
    return cfg.weights[0] * degrade(q.psnr, cfg.psnr) + cfg.weights[1] * degrade(q.ssim, cfg.ssim) +
           cfg.weights[2] * degrade(q.nmi, cfg.nmi);
}

double total_score(double detection, double quality) {
    if (detection < 0.0 || quality < 0.0) throw Error("total_score: scores must be non-negative");
    return std::hypot(detection, quality);
}

}  // namespace wmlab
