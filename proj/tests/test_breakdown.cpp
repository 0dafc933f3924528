#include "doctest.h"
#include "robvario/breakdown.hpp"
#include "robvario/errors.hpp"

using namespace robvario;

namespace {

Rational bp(Scenario s, BreakdownEstimator e, int nx, int h, int m = 0)
{
    return breakdown_point({s, e, nx, h, m});
}

} // namespace

TEST_CASE("rationals")
{
    CHECK(Rational(6, 100) == Rational(3, 50));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(21, 250).str() == "21/250");
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(21, 250).value() == 0.084);
    CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("block scenario values")
{
    CHECK(bp(Scenario::Block, BreakdownEstimator::McdOrgMod, 50, 4, 1) == Rational(3, 50));
    CHECK(bp(Scenario::Block, BreakdownEstimator::McdDiffMod, 50, 4, 1) == Rational(9, 50));
    CHECK(bp(Scenario::Block, BreakdownEstimator::McdOrg, 50, 4) == Rational(17, 50));
    CHECK(bp(Scenario::Block, BreakdownEstimator::McdDiff, 50, 4) == Rational(18, 50));
    CHECK(bp(Scenario::Block, BreakdownEstimator::Genton, 50, 4) == Rational(19, 50));
}

TEST_CASE("isolated scenario values")
{
    CHECK(bp(Scenario::Isolated, BreakdownEstimator::McdOrgMod, 50, 4, 1) == Rational(2, 50));
    CHECK(bp(Scenario::Isolated, BreakdownEstimator::McdDiffMod, 50, 4, 1) == Rational(3, 50));
    CHECK(bp(Scenario::Isolated, BreakdownEstimator::McdOrg, 50, 4) == Rational(21, 250));
    CHECK(bp(Scenario::Isolated, BreakdownEstimator::McdDiff, 50, 4) == Rational(22, 250));
    CHECK_THROWS_AS(bp(Scenario::Isolated, BreakdownEstimator::Genton, 50, 4), NotUsable);
}

TEST_CASE("unusable and invalid queries")
{
    CHECK_THROWS_AS(bp(Scenario::Block, BreakdownEstimator::McdOrgMod, 50, 6, 5), NotUsable);
    CHECK_THROWS_AS(bp(Scenario::Block, BreakdownEstimator::McdOrg, 4, 4), DomainError);
    CHECK_THROWS_AS(bp(Scenario::Block, BreakdownEstimator::McdOrgMod, 50, 2, -1), DomainError);
    CHECK(breakdown_dimension({Scenario::Block, BreakdownEstimator::McdOrg, 50, 4, 0}) == 5);
    CHECK(breakdown_dimension({Scenario::Block, BreakdownEstimator::McdDiffMod, 50, 4, 0}) == 4);
}

TEST_CASE("names")
{
    for (auto e : {BreakdownEstimator::McdOrg, BreakdownEstimator::McdDiff, BreakdownEstimator::McdOrgMod,
                   BreakdownEstimator::McdDiffMod, BreakdownEstimator::Genton})
        CHECK(parse_breakdown_estimator(to_string(e)) == e);
    CHECK(parse_scenario("isolated") == Scenario::Isolated);
    CHECK_THROWS_AS(parse_scenario("stripe"), ParseError);
}

TEST_CASE("nonincreasing in h_max")
{
    for (int nx = 30; nx <= 100; ++nx)
        for (auto s : {Scenario::Block, Scenario::Isolated})
            for (auto e : {BreakdownEstimator::McdOrg, BreakdownEstimator::McdDiff, BreakdownEstimator::Genton}) {
                if (s == Scenario::Isolated && e == BreakdownEstimator::Genton)
                    continue;
                for (int h = 2; h < 8; ++h)
                    CHECK(bp(s, e, nx, h + 1) <= bp(s, e, nx, h));
            }
}

TEST_CASE("empirical check of the mod estimators is exact")
{
    RngStream rng(17, 0);
    for (auto s : {Scenario::Block, Scenario::Isolated})
        for (auto e : {BreakdownEstimator::McdOrgMod, BreakdownEstimator::McdDiffMod}) {
            // n* = 12 non-overlapping vectors, enough for the 2*h_max partition rule
            const BreakdownQuery q{s, e, 50, 2, 1};
            const int crit = critical_outliers(q);
            CHECK(empirical_breakdown_check(q, 1e6, rng));
            CHECK_FALSE(empirical_breakdown_check(q, crit - 1, 1e6, rng));
        }
}

TEST_CASE("empirical check of the plain MCD estimators")
{
    RngStream rng(18, 0);
    for (auto e : {BreakdownEstimator::McdOrg, BreakdownEstimator::McdDiff}) {
        const BreakdownQuery block{Scenario::Block, e, 50, 4, 0};
        CHECK(empirical_breakdown_check(block, 1e6, rng));
        // the isolated bound is a lower bound: below it the estimate must hold
        const BreakdownQuery iso{Scenario::Isolated, e, 50, 4, 0};
        const Rational eps = breakdown_point(iso);
        const int below = static_cast<int>(eps.num * 50 / eps.den);
        CHECK_FALSE(empirical_breakdown_check(iso, below - 1, 1e6, rng));
    }
    CHECK_FALSE(empirical_breakdown_check({Scenario::Block, BreakdownEstimator::McdDiffMod, 50, 2, 1}, 0, 1e6, rng));
}
