#include <doctest.h>

#include <algorithm>

#include "helpers.h"
#include "wmlab/attacks.h"
#include "wmlab/color.h"
#include "wmlab/corpus.h"
#include "wmlab/metrics.h"

using namespace wmlab;
using testutil::grey_image;
using testutil::random_image;
using testutil::random_plane;

namespace {

/// Solves the dense system A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
        std::swap(A[c], A[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

PipelineConfig small_pipeline() {
    PipelineConfig cfg;
    cfg.training_pairs = 24;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_SUITE("attacks") {

TEST_CASE("translation attack") {
    RasterImage x = random_image(40, 20, 1);
    CHECK(translation_attack(x, 0) == x);
    RasterImage t = translation_attack(x, 7);
    for (int y = 0; y < 20; ++y)
        for (int j = 0; j < 40; ++j)
            for (int c = 0; c < 3; ++c) CHECK(t.at(y, j, c) == (j < 7 ? x.at(y, j, c) : x.at(y, j - 7, c)));
}

TEST_CASE("translation removes the ring watermark") {
    auto covers = gen_corpus(100, 128, 0x7a, 0);
    int below = 0;
    for (std::size_t i = 0; i < covers.size(); ++i) {
        WatermarkKey k = WatermarkKey::fourier_ring(i);
        // 0.2 bounds the clean statistic (see the watermark suite).
        below += ring_detect(translation_attack(ring_embed(covers[i], k), 7), k) < 0.2;
    }
    CHECK(below >= 95);
}

TEST_CASE("filter trained on identical pairs is the identity") {
    FilterTrainer t;
    for (int s = 0; s < 3; ++s) {
        RasterImage x = random_image(16, 16, s);
        t.add(x, x);
    }
    for (double ridge : {0.0, 1.0})
        for (auto g : t.finish(ridge).gains) CHECK(std::abs(g - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("large ridge pulls the filter to identity") {
    FilterTrainer t;
    for (int s = 0; s < 3; ++s) t.add(random_image(16, 16, s), random_image(16, 16, 10 + s));
    for (auto g : t.finish(1e12).gains) CHECK(std::abs(g - cplx(1.0, 0.0)) < 1e-6);
}

TEST_CASE("empty training set and size mismatch are rejected") {
    CHECK_THROWS_AS(FilterTrainer{}.finish(1.0), Error);
    CHECK_THROWS_AS(train_spectral_filter(PairedDataset{}, 1.0), Error);
    CHECK_THROWS_AS(apply_spectral_filter(RasterImage(16, 16), SpectralFilter::identity(8, 8)), Error);
}

TEST_CASE("single-frequency watermark: gains match the scalar least-squares solution") {
    const int N = 16, u0 = 3, v0 = 5;
    const double amp = 0.025, ridge = 1.0;  // cover and watermark energy comparable at k0
    Plane w(N, N);
    for (int y = 0; y < N; ++y)
        for (int x = 0; x < N; ++x) w(y, x) = amp * std::cos(2 * std::numbers::pi * (double(u0) * y / N + double(v0) * x / N) + 0.7);
    auto W = testutil::naive_dft(w);
    const std::size_t k0 = std::size_t(u0) * N + v0;

    FilterTrainer t;
    cplx num = 0.0;
    double den = 0.0;
    for (int s = 0; s < 20; ++s) {
        Plane c = random_plane(N, N, 40 + s, 0.2, 0.8);
        Plane plus = c, minus = c;
        for (std::size_t i = 0; i < c.size(); ++i) {
            plus.v[i] += w.v[i];
            minus.v[i] -= w.v[i];
        }
        t.add(grey_image(plus), grey_image(minus));
        cplx C = testutil::naive_dft(c)[k0];
        num += std::conj(C + W[k0]) * (C - W[k0]);
        den += std::norm(C + W[k0]);
    }
    cplx oracle = (num + ridge) / (den + ridge);
    SpectralFilter f = t.finish(ridge);
    CHECK(std::abs(f.gains[k0] - oracle) < 1e-6);
    CHECK(std::abs(f.gains[k0]) < 0.5);
    const std::size_t k0_mirror = std::size_t(N - u0) * N + (N - v0);
    for (std::size_t k = 0; k < f.gains.size(); ++k)
        if (k != k0 && k != k0_mirror) CHECK(std::abs(f.gains[k] - cplx(1.0, 0.0)) < 0.05);
}

TEST_CASE("unregularised filter equals the dense least-squares convolution kernel") {
    // Oracle: the best circular convolution kernel h (64 unknowns) mapping
    // inputs to targets, from the dense spatial-domain normal equations.
    const int N = 8;
    std::vector<Plane> in, out;
    for (int s = 0; s < 4; ++s) {
        in.push_back(random_plane(N, N, 70 + s));
        out.push_back(random_plane(N, N, 80 + s));
    }
    const int M = N * N;
    std::vector<std::vector<double>> AtA(M, std::vector<double>(M, 0.0));
    std::vector<double> Atb(M, 0.0);
    for (std::size_t p = 0; p < in.size(); ++p)
        for (int y = 0; y < N; ++y)
            for (int x = 0; x < N; ++x) {
                std::vector<double> row(M);
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) row[a * N + b] = in[p]((y - a + N) % N, (x - b + N) % N);
                for (int i = 0; i < M; ++i) {
                    Atb[i] += row[i] * out[p](y, x);
                    for (int j = 0; j < M; ++j) AtA[i][j] += row[i] * row[j];
                }
            }
    std::vector<double> h = solve_dense(AtA, Atb);
    Plane hp(N, N);
    hp.v = h;
    auto H = testutil::naive_dft(hp);

    FilterTrainer t;
    for (std::size_t p = 0; p < in.size(); ++p) t.add(grey_image(in[p]), grey_image(out[p]));
    SpectralFilter f = t.finish(0.0);
    for (int k = 0; k < M; ++k) CHECK(std::abs(f.gains[k] - H[k]) < 1e-5);
}

TEST_CASE("identity filter leaves images unchanged") {
    RasterImage x = random_image(24, 16, 3, 0.1, 0.9);
    SpectralFilter id = SpectralFilter::identity(24, 16);
    RasterImage once = apply_spectral_filter(x, id), twice = apply_spectral_filter(once, id);
    for (std::size_t i = 0; i < x.data().size(); ++i) {
        CHECK(std::abs(once.data()[i] - x.data()[i]) <= 1e-5);
        CHECK(std::abs(twice.data()[i] - once.data()[i]) <= 1e-5);
    }
}

TEST_CASE("haar denoiser") {
    Plane p = random_plane(32, 16, 5);
    Plane same = haar_soft_denoise(p, 0.0, 2);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(same.v[i] - p.v[i]) < 1e-12);

    // An enormous threshold removes every detail band, leaving 4x4 block means.
    Plane coarse = haar_soft_denoise(p, 1e9, 2);
    for (int by = 0; by < 16; by += 4)
        for (int bx = 0; bx < 32; bx += 4) {
            double mean = 0.0;
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x) mean += p(by + y, bx + x) / 16.0;
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x) CHECK(coarse(by + y, bx + x) == doctest::Approx(mean).epsilon(1e-10));
        }
    CHECK_THROWS_AS(haar_soft_denoise(Plane(30, 16), 0.1, 2), Error);
}

TEST_CASE("regeneration") {
    RasterImage x = gen_cover(64, 3, 0);
    RasterImage same = regenerate(x, {0.0, 1, 2.0, 9});
    for (std::size_t i = 0; i < x.data().size(); ++i) CHECK(std::abs(same.data()[i] - x.data()[i]) < 1e-12);

    RegenConfig cfg{0.16, 2, 2.0, 11};
    CHECK(regenerate(x, cfg) == regenerate(x, cfg));
    RegenConfig other = cfg;
    other.seed = 12;
    CHECK(!(regenerate(x, cfg) == regenerate(x, other)));
    CHECK(psnr(x, regenerate(x, {0.25, 1, 2.0, 1})) < psnr(x, regenerate(x, {0.04, 1, 2.0, 1})));

    // Odd sizes are padded internally and cropped back.
    RasterImage odd = gen_cover(37, 4, 0);
    CHECK(regenerate(odd, cfg).same_shape(odd));
    CHECK_THROWS_AS(regenerate(x, {1.5, 1, 2.0, 0}), Error);
    CHECK_THROWS_AS(regenerate(x, {0.1, 0, 2.0, 0}), Error);
}

TEST_CASE("refine gradient matches central differences") {
    RefineConfig cfg;
    const double h = 1e-4;
    for (int s = 0; s < 5; ++s) {
        RasterImage x = random_image(16, 16, 10 + s, 0.2, 0.8);
        RasterImage xa = random_image(16, 16, 20 + s, 0.2, 0.8);
        RasterImage xw = random_image(16, 16, 30 + s, 0.2, 0.8);
        auto g = refine_gradient(x, xa, xw, cfg);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            RasterImage p = x, m = x;
            p.data()[i] += h;
            m.data()[i] -= h;
            double fd = (refine_objective(p, xa, xw, cfg) - refine_objective(m, xa, xw, cfg)) / (2 * h);
            num += (g[i] - fd) * (g[i] - fd);
            den += fd * fd;
        }
        CHECK(std::sqrt(num / den) <= 1e-3);
    }
}

TEST_CASE("refine keeps a perfect input and never raises its objective") {
    RasterImage xw = gen_cover(32, 5, 0);
    CHECK(refine(xw, xw) == xw);

    int improved = 0;
    for (int s = 0; s < 20; ++s) {
        RasterImage w = gen_cover(32, 6, s);
        RasterImage att = regenerate(w, {0.08, 1, 2.0, std::uint64_t(s)});
        RefineResult r = refine_traced(att, w);
        for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1]);
        CHECK(r.accepted_steps == int(r.objective.size()) - 1);
        improved += psnr(r.image, w) >= psnr(att, w);
    }
    CHECK(improved >= 19);
    CHECK_THROWS_AS(refine(xw, xw, {0, 0.05, 0.5, 1.0}), Error);
}

TEST_CASE("colour and contrast transfer matches lightness moments") {
    for (int s = 0; s < 10; ++s) {
        RasterImage opt = random_image(24, 24, 40 + s, 0.1, 0.7), w = random_image(24, 24, 50 + s, 0.3, 0.9);
        auto r = color_contrast_transfer(opt, w);
        ChannelStats target = luminance_stats(srgb_to_lab(w));
        CHECK(!r.contrast_skipped);
        CHECK(std::abs(r.lightness_mean - target.mean) <= 1e-4);
        CHECK(std::abs(r.lightness_std - target.std) <= 1e-4);
    }
}

TEST_CASE("colour and contrast transfer edge cases") {
    RasterImage w = random_image(16, 16, 3);
    RasterImage back = color_contrast_transfer(w, w).image;
    for (std::size_t i = 0; i < w.data().size(); ++i) CHECK(std::abs(back.data()[i] - w.data()[i]) <= 1.0 / 255.0);

    auto flat = color_contrast_transfer(RasterImage(16, 16, 0.5), w);
    CHECK(flat.contrast_skipped);

    // Chroma comes from x_w; in-gamut colours survive the sRGB round trip.
    RasterImage mild = random_image(16, 16, 9, 0.35, 0.65);
    LabImage lw = srgb_to_lab(mild), lo = srgb_to_lab(color_contrast_transfer(random_image(16, 16, 8, 0.3, 0.7), mild).image);
    double chroma_err = 0.0;
    for (std::size_t i = 0; i < lw.a.size(); ++i)
        chroma_err = std::max({chroma_err, std::abs(lw.a.v[i] - lo.a.v[i]), std::abs(lw.b.v[i] - lo.b.v[i])});
    CHECK(chroma_err < 1e-6);
}

TEST_CASE("colour transfer does not restore a removed ring watermark") {
    auto covers = gen_corpus(20, 128, 0x3c, 0);
    int below = 0;
    for (std::size_t i = 0; i < covers.size(); ++i) {
        WatermarkKey k = WatermarkKey::fourier_ring(i);
        RasterImage w = ring_embed(covers[i], k);
        RasterImage out = color_contrast_transfer(translation_attack(w, 7), w).image;
        below += ring_detect(out, k) < 0.2;
    }
    CHECK(below >= 19);
}

TEST_CASE("routing table follows the cluster labels") {
    CHECK(route_for(ClusterLabel::NoArtifact) == Route::Regenerate);
    CHECK(route_for(ClusterLabel::Boundary) == Route::LearnedFilter);
    CHECK(route_for(ClusterLabel::FourierRing) == Route::LearnedFilter);
    CHECK(route_for(ClusterLabel::FourierSquare) == Route::RegenerateTranslate);
}

TEST_CASE("empty pipeline input gives an empty manifest") {
    PipelineResult r = blackbox_pipeline({}, small_pipeline());
    CHECK(r.images.empty());
    CHECK(r.manifest.empty());
    CHECK(r.manifest_json().find("\"count\": 0") != std::string::npos);
}

TEST_CASE("pipeline routes each watermark family") {
    auto covers = gen_corpus(4, 128, 0x91, 0);
    std::vector<RasterImage> imgs{
        ss_embed(covers[0], WatermarkKey::spread_spectrum(1), BitMessage::random(1)),
        boundary_embed(covers[1], WatermarkKey::boundary_frame(2)),
        ring_embed(covers[2], WatermarkKey::fourier_ring(3)),
        square_embed(covers[3], WatermarkKey::fourier_square(4)),
    };
    PipelineResult r = blackbox_pipeline(imgs, small_pipeline());
    REQUIRE(r.manifest.size() == 4);
    CHECK(r.manifest[0].label == ClusterLabel::NoArtifact);
    CHECK(r.manifest[1].label == ClusterLabel::Boundary);
    CHECK(r.manifest[2].label == ClusterLabel::FourierRing);
    CHECK(r.manifest[3].label == ClusterLabel::FourierSquare);
    for (const auto& e : r.manifest) {
        CHECK(e.ok);
        CHECK(e.route == route_for(e.label));
    }
    // The square route restores the leftmost columns from the input.
    for (int y = 0; y < 128; ++y)
        for (int j = 0; j < 7; ++j)
            for (int c = 0; c < 3; ++c) CHECK(r.images[3].at(y, j, c) == imgs[3].at(y, j, c));
}

TEST_CASE("pipeline output per image does not depend on the rest of the batch") {
    auto covers = gen_corpus(3, 64, 0x15, 0);
    PipelineConfig cfg = small_pipeline();
    PipelineResult all = blackbox_pipeline(covers, cfg, {0, 1, 2});
    PipelineResult some = blackbox_pipeline({covers[0], covers[2]}, cfg, {0, 2});
    CHECK(all.images[0] == some.images[0]);
    CHECK(all.images[2] == some.images[1]);

    cfg.threads = 3;
    PipelineResult threaded = blackbox_pipeline(covers, cfg, {0, 1, 2});
    for (int i = 0; i < 3; ++i) CHECK(threaded.images[i] == all.images[i]);
    CHECK(threaded.manifest_json() == all.manifest_json());
    CHECK_THROWS_AS(blackbox_pipeline(covers, cfg, {0, 1}), Error);
}

}  // TEST_SUITE
