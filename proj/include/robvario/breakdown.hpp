#ifndef ROBVARIO_BREAKDOWN_HPP
#define ROBVARIO_BREAKDOWN_HPP

#include "robvario/rng.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace robvario {

/// Exact fraction with a positive denominator, kept in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
};

enum class Scenario { Block, Isolated };
enum class BreakdownEstimator { McdOrg, McdDiff, McdOrgMod, McdDiffMod, Genton };

std::string to_string(Scenario s);
std::string to_string(BreakdownEstimator e);
Scenario parse_scenario(std::string_view text);
BreakdownEstimator parse_breakdown_estimator(std::string_view text);

/// One-dimensional series of length n_x (a single grid row).
struct BreakdownQuery {
    Scenario scenario = Scenario::Block;
    BreakdownEstimator estimator = BreakdownEstimator::McdOrg;
    int n_x = 50;
    /// h_max for the MCD estimators, the lag h for Genton.
    int h_max = 4;
    /// Dependence range m of the mod estimators.
    int m = 0;
};

/// Vector dimension p: h_max + 1 for org variants, h_max for diff variants.
int breakdown_dimension(const BreakdownQuery& q);

/// Closed-form finite-sample explosion breakdown point.
///
/// Throws NotUsable when a mod estimator has no more vectors than dimensions
/// or for the isolated-outlier Genton case, which has no closed form here.
Rational breakdown_point(const BreakdownQuery& q);

/// Smallest number of outlying cells the closed form says is needed:
/// the block length, or the count of isolated outliers.
int critical_outliers(const BreakdownQuery& q);

/// Plants `outliers` cells of size about +-magnitude (alternating sign, random
/// factor in [1, 2)) in a clean N(0,1) series at every worst-case position
/// (all block starts; for isolated outliers all offsets of an arrangement
/// with one outlier per vector), runs the raw estimator and reports whether
/// some position drives a lag estimate above magnitude^2 / 100.
bool empirical_breakdown_check(const BreakdownQuery& q, int outliers, double magnitude, RngStream& rng);

/// The check at critical_outliers(q).
bool empirical_breakdown_check(const BreakdownQuery& q, double magnitude, RngStream& rng);

} // namespace robvario

#endif // ROBVARIO_BREAKDOWN_HPP
