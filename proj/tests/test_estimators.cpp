#include "doctest.h"
#include "robvario/errors.hpp"
#include "robvario/estimators.hpp"
#include "robvario/simfield.hpp"

#include <cmath>

using namespace robvario;

namespace {

Grid iid_grid(int nx, int ny, std::uint64_t seed)
{
    RngStream r(seed, 0);
    Grid g(nx, ny);
    for (double& v : g.values())
        v = r.normal();
    return g;
}

constexpr EstimatorId kPlain[] = {EstimatorId::Matheron, EstimatorId::Genton,  EstimatorId::McdOrg,
                                  EstimatorId::McdOrgRe, EstimatorId::McdDiff, EstimatorId::McdDiffRe};

Eigen::VectorXd run(EstimatorId id, const Grid& g, const LagSet& lags, const EstimatorOptions& opts = {})
{
    RngStream rng(99, 1);
    return estimate(id, g, lags, opts, rng).values;
}

} // namespace

TEST_CASE("estimator ids")
{
    for (EstimatorId id : kPlain)
        CHECK(parse_estimator(to_string(id)) == id);
    CHECK(to_string(EstimatorId::McdDiffModRe) == "mcd.diff.mod.re");
    CHECK(parse_estimator_list("matheron,mcd.org.re").size() == 2);
    CHECK_THROWS_AS(parse_estimator("cressie"), ParseError);
    CHECK(is_mod(EstimatorId::McdOrgMod));
    CHECK(is_reweighted(EstimatorId::McdOrgModRe));
    CHECK_FALSE(is_mcd(EstimatorId::Genton));
    CHECK(vector_kind(EstimatorId::McdDiffRe) == VectorKind::Diff);
}

TEST_CASE("matheron and genton hand examples")
{
    const Grid alt(4, 1, std::vector<double>{0, 1, 0, 1});
    const LagSet lag1 = build_lag_set(Direction::EW, 1);
    const auto m = matheron(alt, lag1);
    CHECK(m.values[0] == 1.0);
    CHECK(m.counts[0] == 3);

    const Grid row(4, 1, std::vector<double>{0, 1, 3, 6});
    QnConfig off;
    off.apply_consistency = false;
    CHECK(genton(row, lag1, off).values[0] == 1.0);
    CHECK(genton(row, lag1).values[0] == doctest::Approx(2.2219 * 2.2219));

    Grid masked = alt;
    masked.set_missing(2, 1, true);
    const auto mm = matheron(masked, lag1);
    CHECK(mm.counts[0] == 1);
    CHECK(mm.values[0] == 1.0);
    CHECK_THROWS_AS(matheron(masked, build_lag_set(Direction::EW, 4)), EmptySample);
}

TEST_CASE("constant grid gives zero for every estimator")
{
    const Grid g(12, 12, 4.2);
    for (EstimatorId id : kPlain)
        for (Direction d : kAllDirections) {
            const Eigen::VectorXd v = run(id, g, build_lag_set(d, 3));
            CHECK(v.size() == 3);
            CHECK(v.cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("translation invariance and scale equivariance")
{
    const Grid g = iid_grid(14, 13, 2);
    Grid shifted = g, scaled = g;
    for (std::size_t i = 0; i < g.size(); ++i) {
        shifted.values()[i] = g.values()[i] + 3.0;
        scaled.values()[i] = 2.5 * g.values()[i];
    }
    for (EstimatorId id : kPlain)
        for (Direction d : kAllDirections) {
            const LagSet lags = build_lag_set(d, 3);
            const Eigen::VectorXd base = run(id, g, lags);
            CHECK((run(id, shifted, lags) - base).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + base.cwiseAbs().maxCoeff()));
            CHECK((run(id, scaled, lags) - 6.25 * base).cwiseAbs().maxCoeff() <=
                  1e-10 * (1.0 + base.cwiseAbs().maxCoeff()));
        }
}

TEST_CASE("difference-vector MCD on independent cells estimates 2")
{
    const Grid g = iid_grid(25, 25, 3);
    const LagSet lags = build_lag_set(Direction::EW, 3);
    RngStream rng(4, 0);
    const auto est = mcd_diff(g, lags, {}, true, rng);
    for (Eigen::Index l = 0; l < est.values.size(); ++l)
        CHECK(std::abs(est.values[l] - 2.0) < 0.3);
    CHECK(est.counts[0] == 25 * 22);
}

TEST_CASE("variogram from an exact Toeplitz scatter")
{
    const AnisoModel m = reference_model();
    const int h = 5;
    Eigen::MatrixXd sigma(h + 1, h + 1);
    for (int i = 0; i <= h; ++i)
        for (int j = 0; j <= h; ++j)
            sigma(i, j) = model_covariance(m, std::abs(i - j), 0);
    const Eigen::VectorXd v = variogram_from_scatter(sigma, VectorKind::Org);
    for (int l = 1; l <= h; ++l)
        CHECK(v[l - 1] == doctest::Approx(aniso_variogram(m, l, 0)).epsilon(1e-12));

    Eigen::MatrixXd d(2, 2);
    d << 1.5, 0.2, 0.2, 2.5;
    CHECK(variogram_from_scatter(d, VectorKind::Diff) == Eigen::Vector2d(1.5, 2.5));
}

TEST_CASE("raw and reweighted share one fit")
{
    const Grid g = iid_grid(15, 15, 5);
    const LagSet lags = build_lag_set(Direction::SN, 4);
    RngStream a(1, 0), b(1, 0), c(1, 0);
    const auto [raw, re] = mcd_raw_and_reweighted(g, lags, VectorKind::Org, {}, a);
    CHECK(raw.values == mcd_org(g, lags, {}, false, b).values);
    CHECK(re.values == mcd_org(g, lags, {}, true, c).values);
}

TEST_CASE("drop largest lag")
{
    const Grid g = iid_grid(15, 15, 6);
    EstimatorOptions opts;
    opts.drop_largest_lag = true;
    const LagSet lags = build_lag_set(Direction::EW, 4);
    CHECK(run(EstimatorId::McdOrgRe, g, lags, opts).size() == 3);
    CHECK(run(EstimatorId::McdDiff, g, lags, opts).size() == 4);
    CHECK(run(EstimatorId::Matheron, g, lags, opts).size() == 4);
}

TEST_CASE("non-overlapping vector count")
{
    CHECK(non_overlapping_count(50, 4, 1) == 8);
    CHECK(non_overlapping_count(50, 6, 5) == 4);
    for (int n = 1; n <= 200; ++n)
        for (int m = 0; m <= 6; ++m)
            for (int h = 1; h <= 8; ++h) {
                int direct = 0;
                for (int s = 1; s + h <= n; s += h + 1 + m)
                    ++direct;
                REQUIRE(non_overlapping_count(n, h, m) == direct);
            }
}

TEST_CASE("mod partitions")
{
    const LagSet lags = build_lag_set(Direction::EW, 4);
    ModConfig mod{1, 0, true};
    const auto parts = mod_partitions(50, 1, lags, mod);
    CHECK(parts.size() == 6);
    CHECK(parts[0].size() == 8);
    CHECK(parts[0][1] == Cell{7, 1});
    for (const auto& p : parts)
        for (std::size_t i = 1; i < p.size(); ++i)
            CHECK(p[i].x - p[i - 1].x == 6);

    ModConfig rows{0, 2, true};
    const auto rp = mod_partitions(20, 9, lags, rows);
    CHECK(rp.size() == 3 * 5);
    for (const Cell c : rp[5])
        CHECK(c.y % 3 == 2);

    CHECK_THROWS_AS(mod_partitions(20, 20, build_lag_set(Direction::SWNE, 2), mod), NotUsable);
}

TEST_CASE("mod estimator usability on a single row")
{
    const Grid line = iid_grid(50, 1, 7);
    RngStream rng(1, 2);
    CHECK_THROWS_AS(mcd_mod(line, build_lag_set(Direction::EW, 6), VectorKind::Org, {5, 0, true}, {}, false, rng),
                    NotUsable);
    // 8 vectors of dimension 5 do not exceed 2*h_max = 8
    CHECK_THROWS_AS(mcd_mod(line, build_lag_set(Direction::EW, 4), VectorKind::Org, {1, 0, true}, {}, false, rng),
                    NotUsable);
    const auto ok = mcd_mod(line, build_lag_set(Direction::EW, 2), VectorKind::Diff, {1, 0, true}, {}, true, rng);
    CHECK(ok.values.size() == 2);
    CHECK(ok.values.allFinite());
}

TEST_CASE("a single partition equals one MCD fit on its vectors")
{
    const Grid g = iid_grid(30, 12, 8);
    const LagSet lags = build_lag_set(Direction::EW, 2);
    const ModConfig single{0, 0, false};
    const auto parts = mod_partitions(30, 12, lags, single);
    REQUIRE(parts.size() == 1);
    RngStream a(3, 3), b(3, 3);
    const auto est = mcd_mod(g, lags, VectorKind::Diff, single, {}, false, a);
    const auto sample = extract_vectors_at(g, lags, parts[0], true);
    const McdFit fit = fast_mcd(sample.rows, {}, b);
    CHECK(est.values == variogram_from_scatter(fit.sigma, VectorKind::Diff));
}

TEST_CASE("matheron is unbiased on simulated fields")
{
    FieldSpec spec;
    spec.model = reference_model();
    const FieldSimulator sim(spec);
    const LagSet lags = build_lag_set(Direction::EW, 7);
    const int reps = 400;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(7), sq = Eigen::VectorXd::Zero(7);
    for (int r = 0; r < reps; ++r) {
        RngStream rng(21, static_cast<std::uint64_t>(r));
        const Eigen::VectorXd v = matheron(sim.simulate(rng), lags).values;
        sum += v;
        sq += v.cwiseProduct(v);
    }
    for (int l = 0; l < 7; ++l) {
        const double mean = sum[l] / reps;
        const double se = std::sqrt((sq[l] / reps - mean * mean) / reps);
        CHECK(std::abs(mean - aniso_variogram(spec.model, lags.lags[l])) < 4.0 * se);
    }
}
