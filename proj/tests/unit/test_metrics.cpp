#include <doctest.h>

#include "helpers.h"
#include "wmlab/metrics.h"

using namespace wmlab;
using testutil::random_image;
using testutil::random_plane;

namespace {

/// Relative error ||a - b|| / ||b||.
double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("psnr of identical images is capped") {
    RasterImage x = random_image(16, 16, 1);
    CHECK(psnr(x, x) == kPsnrCap);
}

TEST_CASE("psnr of a uniform 10/255 offset") {
    RasterImage a(32, 32, 0.4), b(32, 32, 0.4 + 10.0 / 255.0);
    CHECK(psnr(a, b) == doctest::Approx(20.0 * std::log10(25.5)).epsilon(1e-9));
    CHECK(psnr(a, b) == doctest::Approx(28.13).epsilon(1e-4));
}

TEST_CASE("psnr matches direct summation and is symmetric") {
    for (int s = 0; s < 5; ++s) {
        RasterImage a = random_image(20, 13, s), b = random_image(20, 13, 100 + s);
        double ref = 0.0;
        for (int c = 0; c < 3; ++c) ref += 10.0 * std::log10(1.0 / testutil::direct_mse(a, b, c)) / 3.0;
        CHECK(std::abs(psnr(a, b) - ref) < 1e-6);
        CHECK(psnr(a, b) == psnr(b, a));
    }
    CHECK_THROWS_AS(psnr(RasterImage(4, 4), RasterImage(4, 5)), Error);
}

TEST_CASE("ssim basics") {
    Plane x = random_plane(24, 24, 2);
    CHECK(ssim(x, x) == 1.0);
    Plane inv = x;
    for (double& v : inv.v) v = 1.0 - v;
    CHECK(ssim(x, inv) < 0.0);
    Plane y = random_plane(24, 24, 3);
    CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-12));
    CHECK(ssim(x, y) >= -1.0);
    CHECK(ssim(x, y) <= 1.0);
    CHECK_THROWS_AS(ssim(Plane(10, 10), Plane(10, 10)), Error);
}

TEST_CASE("ssim gradient matches central differences") {
    const double h = 1e-4;
    for (int s = 0; s < 20; ++s) {
        Plane a = random_plane(16, 16, 200 + s), b = random_plane(16, 16, 300 + s);
        Plane g = ssim_grad(a, b);
        std::vector<double> fd(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            Plane p = a, m = a;
            p.v[i] += h;
            m.v[i] -= h;
            fd[i] = (ssim(p, b) - ssim(m, b)) / (2 * h);
        }
        CHECK(relative_error(g.v, fd) <= 1e-3);
    }
}

TEST_CASE("ssim gradient vanishes at the maximum") {
    Plane a = random_plane(16, 16, 7);
    for (double v : ssim_grad(a, a).v) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("nmi identities") {
    RasterImage x = random_image(32, 32, 4);
    CHECK(nmi(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    RasterImage y = random_image(32, 32, 5);
    CHECK(nmi(x, y) == nmi(y, x));
    CHECK_THROWS_AS(nmi(RasterImage(4, 4), RasterImage(5, 4)), Error);
}

TEST_CASE("nmi of independent noise is small") {
    // Plug-in estimator bias keeps this near 0.08 at 256x256 with 256 bins.
    for (int s = 0; s < 20; ++s) CHECK(nmi(random_image(256, 256, 500 + s), random_image(256, 256, 600 + s)) <= 0.10);
}

TEST_CASE("quality aggregate anchors") {
    QualityConfig cfg;
    CHECK(quality_aggregate({kPsnrCap, 1.0, 1.0}, cfg) == 0.0);
    CHECK(quality_aggregate({15.0, 0.5, 0.1}, cfg) == doctest::Approx(1.0));
    CHECK(quality_aggregate({30.0, 0.75, 0.55}, cfg) == doctest::Approx(0.5));
    CHECK(quality_aggregate({0.0, -1.0, 0.0}, cfg) == doctest::Approx(1.0));
    QualityConfig bad;
    bad.weights = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("total score reproduces the published leaderboard rows") {
    struct Row {
        double d, q, total;
    };
    const Row rows[] = {{0.043, 0.136, 0.143}, {0.063, 0.158, 0.170}, {0.087, 0.177, 0.197},
                        {0.037, 0.153, 0.157}, {0.050, 0.176, 0.183}, {0.127, 0.222, 0.256}};
    for (const auto& r : rows) CHECK(std::abs(total_score(r.d, r.q) - r.total) <= 0.001);
    CHECK(total_score(0, 0) == 0.0);
    for (double d : {0.0, 0.1, 0.7})
        for (double q : {0.0, 0.3, 1.0})
            CHECK(std::abs(total_score(d, q) * total_score(d, q) - (d * d + q * q)) <= 1e-12);
}

}  // TEST_SUITE
