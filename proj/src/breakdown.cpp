#include "robvario/breakdown.hpp"

#include "robvario/errors.hpp"
#include "robvario/estimators.hpp"

#include <algorithm>
#include <numeric>

namespace robvario {

Rational::Rational(std::int64_t n, std::int64_t d)
{
    if (d == 0)
        throw DomainError("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num = n / (g == 0 ? 1 : g);
    den = d / (g == 0 ? 1 : g);
}

std::string Rational::str() const
{
    return std::to_string(num) + "/" + std::to_string(den);
}

std::string to_string(Scenario s)
{
    return s == Scenario::Block ? "block" : "isolated";
}

std::string to_string(BreakdownEstimator e)
{
    switch (e) {
    case BreakdownEstimator::McdOrg: return "mcd.org";
    case BreakdownEstimator::McdDiff: return "mcd.diff";
    case BreakdownEstimator::McdOrgMod: return "mcd.org.mod";
    case BreakdownEstimator::McdDiffMod: return "mcd.diff.mod";
    case BreakdownEstimator::Genton: return "genton";
    }
    return "?";
}

Scenario parse_scenario(std::string_view text)
{
    if (text == "block")
        return Scenario::Block;
    if (text == "isolated")
        return Scenario::Isolated;
    throw ParseError("unknown scenario '" + std::string(text) + "'");
}

BreakdownEstimator parse_breakdown_estimator(std::string_view text)
{
    for (auto e : {BreakdownEstimator::McdOrg, BreakdownEstimator::McdDiff, BreakdownEstimator::McdOrgMod,
                   BreakdownEstimator::McdDiffMod, BreakdownEstimator::Genton})
        if (to_string(e) == text)
            return e;
    throw ParseError("unknown breakdown estimator '" + std::string(text) + "'");
}

namespace {

bool is_mod(BreakdownEstimator e)
{
    return e == BreakdownEstimator::McdOrgMod || e == BreakdownEstimator::McdDiffMod;
}

// Contaminated vectors needed to break the MCD on n vectors of dimension p.
int mcd_needed(int n, int p)
{
    return n - (n + p + 1) / 2 + 1;
}

void validate(const BreakdownQuery& q)
{
    if (q.h_max < 1 || q.n_x <= q.h_max)
        throw DomainError("breakdown: need n_x > h_max >= 1");
    if (q.m < 0)
        throw DomainError("breakdown: m must be nonnegative");
}

int mod_vectors(const BreakdownQuery& q)
{
    const int n_star = non_overlapping_count(q.n_x, q.h_max, q.m);
    if (n_star <= breakdown_dimension(q))
        throw NotUsable("breakdown: only " + std::to_string(n_star) + " non-overlapping vectors for dimension " +
                        std::to_string(breakdown_dimension(q)));
    return n_star;
}

// Minimal block length disturbing `vectors` non-overlapping vectors.
int block_length_for(int vectors, int h_max, int m)
{
    if (vectors <= 1)
        return 1;
    return 1 + (vectors - 2) * (m + h_max + 1) + m + 1;
}

} // namespace

int breakdown_dimension(const BreakdownQuery& q)
{
    switch (q.estimator) {
    case BreakdownEstimator::McdOrg:
    case BreakdownEstimator::McdOrgMod: return q.h_max + 1;
    case BreakdownEstimator::McdDiff:
    case BreakdownEstimator::McdDiffMod: return q.h_max;
    case BreakdownEstimator::Genton: return 1;
    }
    return 1;
}

Rational breakdown_point(const BreakdownQuery& q)
{
    validate(q);
    const int p = breakdown_dimension(q);
    const int nx = q.n_x;

    if (q.estimator == BreakdownEstimator::Genton) {
        if (q.scenario != Scenario::Block)
            throw NotUsable("breakdown: no closed form for genton with isolated outliers");
        const int n_star = nx - q.h_max;
        // ceil(eps_Qn * n*) with eps_Qn = floor((n*+1)/2) / n*.
        const int needed = (n_star + 1) / 2;
        // l_min = max(needed - h, needed / 2), kept exact in halves.
        const std::int64_t twice_l = std::max<std::int64_t>(2LL * (needed - q.h_max), needed);
        return {twice_l, 2LL * nx};
    }

    if (is_mod(q.estimator)) {
        const int n_star = mod_vectors(q);
        const int needed = mcd_needed(n_star, p);
        if (q.scenario == Scenario::Block)
            return {block_length_for(needed, q.h_max, q.m), nx};
        return {needed, nx};
    }

    const int n_star = nx - q.h_max;
    const int needed = mcd_needed(n_star, p);
    if (q.scenario == Scenario::Block)
        return {std::max(needed - q.h_max, 1), nx};
    return {needed, static_cast<std::int64_t>(q.h_max + 1) * nx};
}

int critical_outliers(const BreakdownQuery& q)
{
    const Rational eps = breakdown_point(q);
    // ceil(eps * n_x)
    const std::int64_t scaled = eps.num * q.n_x;
    return static_cast<int>((scaled + eps.den - 1) / eps.den);
}

bool empirical_breakdown_check(const BreakdownQuery& q, int outliers, double magnitude, RngStream& rng)
{
    validate(q);
    if (outliers < 0 || outliers > q.n_x)
        throw DomainError("empirical_breakdown_check: outlier count out of range");

    std::vector<double> clean(static_cast<std::size_t>(q.n_x));
    for (double& v : clean)
        v = rng.normal();
    std::vector<double> sizes(static_cast<std::size_t>(outliers));
    for (std::size_t i = 0; i < sizes.size(); ++i)
        sizes[i] = (i % 2 == 0 ? 1.0 : -1.0) * magnitude * (1.0 + rng.uniform());

    std::vector<std::vector<int>> placements;
    if (outliers == 0) {
        placements.push_back({});
    } else if (q.scenario == Scenario::Block) {
        for (int start = 1; start + outliers - 1 <= q.n_x; ++start) {
            std::vector<int> cells(static_cast<std::size_t>(outliers));
            std::iota(cells.begin(), cells.end(), start);
            placements.push_back(std::move(cells));
        }
    } else {
        const int spacing = is_mod(q.estimator) ? q.h_max + 1 + q.m : q.h_max + 1;
        for (int offset = 1; offset <= spacing; ++offset) {
            const int last = offset + (outliers - 1) * spacing;
            if (last > q.n_x)
                break;
            std::vector<int> cells;
            for (int i = 0; i < outliers; ++i)
                cells.push_back(offset + i * spacing);
            placements.push_back(std::move(cells));
        }
    }
    if (placements.empty())
        throw NotUsable("empirical_breakdown_check: outliers do not fit the series");

    const double threshold = magnitude * magnitude / 100.0;
    const LagSet lags = build_lag_set(Direction::EW, q.h_max);
    McdConfig cfg;
    const ModConfig mod{q.m, 0, true};

    for (const auto& cells : placements) {
        Grid g(q.n_x, 1, clean);
        for (std::size_t i = 0; i < cells.size(); ++i)
            g(cells[i], 1) = sizes[i];

        VariogramEstimate est;
        switch (q.estimator) {
        case BreakdownEstimator::McdOrg: est = mcd_org(g, lags, cfg, false, rng); break;
        case BreakdownEstimator::McdDiff: est = mcd_diff(g, lags, cfg, false, rng); break;
        case BreakdownEstimator::McdOrgMod: est = mcd_mod(g, lags, VectorKind::Org, mod, cfg, false, rng); break;
        case BreakdownEstimator::McdDiffMod: est = mcd_mod(g, lags, VectorKind::Diff, mod, cfg, false, rng); break;
        case BreakdownEstimator::Genton: est = genton(g, lags); break;
        }
        if ((est.values.array() > threshold).any())
            return true;
    }
    return false;
}

bool empirical_breakdown_check(const BreakdownQuery& q, double magnitude, RngStream& rng)
{
    return empirical_breakdown_check(q, critical_outliers(q), magnitude, rng);
}

} // namespace robvario
