#include "wmlab/artifacts.h"

#include <algorithm>
#include <cmath>

namespace wmlab {

namespace {

// Log-magnitude noise floor added to the MAD.
constexpr double kProminenceFloor = 0.05;

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    double hi = *mid;
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

double boundary_score(const RasterImage& img) {
    Plane y = luminance(img);
    int h = y.height, w = y.width;
    if (h < 2 * kBoundaryFrame + 2 || w < 2 * kBoundaryFrame + 2) return 0.0;
    double frame_sum = 0.0, inner_sum = 0.0;
    std::size_t frame_n = 0, inner_n = 0;
    for (int r = 0; r < h - 1; ++r)
        for (int c = 0; c < w - 1; ++c) {
            double g = std::hypot(y(r, c + 1) - y(r, c), y(r + 1, c) - y(r, c));
            bool frame = r < kBoundaryFrame || c < kBoundaryFrame || r >= h - 1 - kBoundaryFrame ||
                         c >= w - 1 - kBoundaryFrame;
            if (frame) {
                frame_sum += g;
                ++frame_n;
            } else {
                inner_sum += g;
                ++inner_n;
            }
        }
    double frame_mean = frame_sum / double(frame_n);
    double inner_mean = inner_sum / double(inner_n);
    return std::max(0.0, frame_mean / (inner_mean + 1e-12) - 1.0);
}

double ring_score(const Spectrum& spec) {
    auto profile = radial_profile_excluding_cross(spec, kDcCrossHalfWidth);
    // Skip the 1/f-dominated core and radii whose circles leave the grid.
    int r_lo = 3;
    int r_hi = std::min(spec.width, spec.height) / 2 - 1;
    if (r_hi - r_lo < 8) return 0.0;
    std::vector<double> band(profile.begin() + r_lo, profile.begin() + r_hi + 1);
    return peak_prominence(band);
}

double square_score(const Spectrum& spec) {
    Plane lm = centered_log_magnitude(spec);
    int h = spec.height, w = spec.width;
    int cu = h / 2, cv = w / 2;
    auto projection = [&](bool rows) {
        int n_outer = rows ? h : w;
        int centre_outer = rows ? cu : cv;
        int n_inner = rows ? w : h;
        int centre_inner = rows ? cv : cu;
        std::vector<double> out;
        for (int f = 2; centre_outer + f < n_outer; ++f) {
            double best = 0.0;
            for (int i = 0; i < n_inner; ++i) {
                if (std::abs(i - centre_inner) <= kDcCrossHalfWidth) continue;
                double val = rows ? lm(centre_outer + f, i) : lm(i, centre_outer + f);
                best = std::max(best, val);
            }
            out.push_back(best);
        }
        return out;
    };
    auto row_proj = projection(true);
    auto col_proj = projection(false);
    double s = 0.0;
    if (row_proj.size() >= 8) s = std::max(s, peak_prominence(row_proj));
    if (col_proj.size() >= 8) s = std::max(s, peak_prominence(col_proj));
    return s;
}

}  // namespace

std::string to_string(ClusterLabel label) {
    switch (label) {
        case ClusterLabel::NoArtifact: return "no_artifact";
        case ClusterLabel::Boundary: return "boundary";
        case ClusterLabel::FourierRing: return "fourier_ring";
        case ClusterLabel::FourierSquare: return "fourier_square";
    }
    return "unknown";
}

ClusterLabel cluster_from_string(const std::string& s) {
    if (s == "no_artifact") return ClusterLabel::NoArtifact;
    if (s == "boundary") return ClusterLabel::Boundary;
    if (s == "fourier_ring") return ClusterLabel::FourierRing;
    if (s == "fourier_square") return ClusterLabel::FourierSquare;
    throw Error("unknown cluster label: " + s);
}

double peak_prominence(const std::vector<double>& profile, int half_window) {
    const int n = int(profile.size());
    if (n == 0) return 0.0;
    std::vector<double> detrended(n);
    std::vector<double> window;
    for (int i = 0; i < n; ++i) {
        window.clear();
        for (int j = std::max(0, i - half_window); j <= std::min(n - 1, i + half_window); ++j)
            window.push_back(profile[j]);
        detrended[i] = profile[i] - median(window);
    }
    double med = median(detrended);
    std::vector<double> dev(n);
    for (int i = 0; i < n; ++i) dev[i] = std::abs(detrended[i] - med);
    double mad = median(dev);
    // One-sided windows at the ends cannot detrend a sloped profile.
    int lo = 0, hi = n;
    if (n > 2 * half_window) lo = half_window, hi = n - half_window;
    double peak = *std::max_element(detrended.begin() + lo, detrended.begin() + hi);
    return std::max(0.0, (peak - med) / (mad + kProminenceFloor));
}

ArtifactScores artifact_scores(const RasterImage& img) {
    Spectrum spec = fft2(img);
    ArtifactScores s;
    s.boundary = boundary_score(img);
    s.ring = ring_score(spec);
    s.square = square_score(spec);
    return s;
}

ClusterLabel classify_cluster(const ArtifactScores& scores, const ClusterThresholds& t) {
    if (scores.boundary > t.boundary) return ClusterLabel::Boundary;
    if (scores.ring > t.ring) return ClusterLabel::FourierRing;
    if (scores.square > t.square) return ClusterLabel::FourierSquare;
    return ClusterLabel::NoArtifact;
}

}  // namespace wmlab
