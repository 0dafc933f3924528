#include "doctest.h"
#include "robvario/errors.hpp"
#include "robvario/numerics.hpp"
#include "robvario/rng.hpp"
#include "robvario/variomodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace robvario;

TEST_CASE("spherical model values")
{
    const IsoModel m{Family::Spherical, 5.0, 2.0};
    CHECK(iso_variogram(m, 0.0) == 0.0);
    CHECK(iso_variogram(m, 7.0) == 2.0);
    CHECK(iso_variogram(m, 5.0) == doctest::Approx(2.0));
    CHECK(iso_variogram(m, 2.5) == doctest::Approx(1.375).epsilon(1e-14));
    CHECK_THROWS_AS(iso_variogram(m, -1.0), DomainError);
}

TEST_CASE("practical range families")
{
    for (Family f : {Family::Exponential, Family::Gaussian}) {
        const IsoModel m{f, 4.0, 3.0};
        CHECK(iso_variogram(m, 0.0) == 0.0);
        CHECK(iso_variogram(m, 4.0) == doctest::Approx(3.0 * (1.0 - std::exp(-3.0))));
        double prev = 0.0;
        for (double d = 0.1; d < 20.0; d += 0.1) {
            const double v = iso_variogram(m, d);
            CHECK(v >= prev);
            CHECK(v <= 3.0);
            prev = v;
        }
    }
}

TEST_CASE("anisotropic reference example")
{
    const AnisoModel m = reference_model();
    CHECK(transformed_norm(m, 1, 0) == doctest::Approx(0.7572).epsilon(1e-4));
    CHECK(aniso_variogram(m, 1, 0) == doctest::Approx(0.4509).epsilon(1e-3));
    CHECK(model_covariance(m, 1, 0) == doctest::Approx(0.7745).epsilon(1e-3));
    CHECK(aniso_variogram(m, 0, 0) == 0.0);
    CHECK(model_covariance(m, 0, 0) == 1.0);
    CHECK(model_covariance(m, 10, 0) == 0.0);
}

TEST_CASE("isotropic when ratio is one")
{
    AnisoModel m{{Family::Spherical, 5.0, 2.0}, 1.234, 1.0};
    for (int dx = -6; dx <= 6; ++dx)
        for (int dy = -6; dy <= 6; ++dy)
            CHECK(aniso_variogram(m, dx, dy) == doctest::Approx(iso_variogram(m.iso, std::hypot(dx, dy))));
}

TEST_CASE("rotation by pi and the variogram/covariance identity")
{
    AnisoModel m = reference_model();
    AnisoModel flipped = m;
    flipped.theta += std::numbers::pi;
    for (int dx = -5; dx <= 5; ++dx)
        for (int dy = -5; dy <= 5; ++dy) {
            CHECK(aniso_variogram(flipped, dx, dy) == doctest::Approx(aniso_variogram(m, dx, dy)));
            CHECK(2 * model_covariance(m, 0, 0) - 2 * model_covariance(m, dx, dy) ==
                  doctest::Approx(aniso_variogram(m, dx, dy)));
        }
}

TEST_CASE("model covariance is positive semidefinite on random location sets")
{
    RngStream rng(8, 0);
    for (Family f : {Family::Spherical, Family::Exponential, Family::Gaussian}) {
        const AnisoModel m{{f, 5.0, 2.0}, 3.0 * std::numbers::pi / 8.0, 2.0};
        for (int trial = 0; trial < 10; ++trial) {
            const int n = 5 + static_cast<int>(rng.below(46));
            std::vector<std::pair<int, int>> pts;
            while (static_cast<int>(pts.size()) < n) {
                const std::pair<int, int> p{static_cast<int>(rng.below(30)), static_cast<int>(rng.below(30))};
                if (std::find(pts.begin(), pts.end(), p) == pts.end())
                    pts.push_back(p);
            }
            Eigen::MatrixXd c(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    c(i, j) = model_covariance(m, pts[j].first - pts[i].first, pts[j].second - pts[i].second);
            // slack for rounding; the gaussian family is nearly singular on dense sets
            const double slack = f == Family::Gaussian ? 1e-6 : 1e-10;
            CHECK_NOTHROW(cholesky_factor(Eigen::MatrixXd(c + slack * Eigen::MatrixXd::Identity(n, n))));
        }
    }
}

TEST_CASE("model strings")
{
    const AnisoModel m = parse_model("spherical:5:2:1.1780972450961724:2");
    CHECK(m.iso.family == Family::Spherical);
    CHECK(m.iso.range == 5.0);
    CHECK(m.theta == doctest::Approx(3.0 * std::numbers::pi / 8.0));
    const AnisoModel back = parse_model(to_string(m));
    CHECK(back.theta == m.theta);
    CHECK(back.ratio == m.ratio);
    CHECK(parse_model("exponential:3:1").ratio == 1.0);
    CHECK_THROWS_AS(parse_model("spherical:5"), ParseError);
    CHECK_THROWS_AS(parse_model("cubic:5:2"), ParseError);
    CHECK_THROWS_AS(parse_model("spherical:-5:2"), ParseError);
    CHECK_THROWS_AS(parse_model("spherical:five:2"), ParseError);
}
