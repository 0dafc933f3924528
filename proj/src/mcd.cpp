#include "robvario/mcd.hpp"

#include "robvario/errors.hpp"
#include "robvario/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace robvario {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// About 45 ulps: rounding in a centred covariance stays well below this, while a
// 1e6-scale outlier (variance ratio 1e-12) is still resolved.
constexpr double kRelativePivot = 1e-14;

// In-place Cholesky with a pivot test relative to each variable's own
// variance, so that subsets mixing wildly different scales (outliers) are not
// mistaken for singular ones.
bool factor_relative(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower, double& log_det)
{
    const Eigen::Index p = a.rows();
    lower.setZero(p, p);
    log_det = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double ajj = a(j, j);
        double d = ajj - lower.row(j).head(j).squaredNorm();
        if (!(ajj > 0.0) || !(d > kRelativePivot * ajj))
            return false;
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        log_det += 2.0 * std::log(ljj);
        for (Eigen::Index i = j + 1; i < p; ++i)
            lower(i, j) = (a(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / ljj;
    }
    return true;
}

long double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0L;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

// Advance `c` to the next k-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& c, int n)
{
    const int k = static_cast<int>(c.size());
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i)
        --i;
    if (i < 0)
        return false;
    ++c[i];
    for (int j = i + 1; j < k; ++j)
        c[j] = c[j - 1] + 1;
    return true;
}

struct Candidate {
    double log_det;
    std::vector<int> subset;
};

bool better(const Candidate& a, const Candidate& b)
{
    if (a.log_det != b.log_det)
        return a.log_det < b.log_det;
    return a.subset < b.subset;
}

void check_data(const Eigen::MatrixXd& data)
{
    if (data.cols() < 1)
        throw DimensionMismatch("mcd: data must have at least one column");
    if (data.rows() <= data.cols())
        throw DimensionMismatch("mcd: need more observations than dimensions (n > p)");
}

McdFit finish_raw(const Eigen::MatrixXd& data, const std::vector<int>& subset, const McdConfig& cfg)
{
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    const int k = static_cast<int>(subset.size());
    SubsetFit fit = fit_subset(data, subset);

    McdFit out;
    out.mu = fit.mean;
    out.support = subset;
    out.exact_fit = fit.singular;
    if (fit.singular) {
        out.log_det = kNegInf;
        out.det = 0.0;
    } else {
        out.log_det = fit.log_det;
        out.det = std::exp(fit.log_det);
    }
    out.factors.raw = cfg.apply_consistency ? mcd_consistency_factor(static_cast<double>(k) / n, p) : 1.0;
    out.sigma = out.factors.raw * fit.cov;
    return out;
}

} // namespace

int subset_size(const McdConfig& cfg, int n, int p)
{
    const int h = (n + p + 1) / 2;
    int k;
    if (cfg.k) {
        k = *cfg.k;
    } else {
        if (!(cfg.alpha >= 0.5 && cfg.alpha <= 1.0))
            throw DomainError("mcd: alpha must lie in [0.5, 1]");
        k = static_cast<int>(std::floor(2.0 * h - n + 2.0 * (n - h) * cfg.alpha + 1e-9));
    }
    if (k < h || k > n)
        throw DomainError("mcd: subset size must satisfy floor((n+p+1)/2) <= k <= n");
    return k;
}

double mcd_consistency_factor(double alpha, int p)
{
    if (!(alpha > 0.0 && alpha <= 1.0) || p < 1)
        throw DomainError("mcd_consistency_factor: need 0 < alpha <= 1 and p >= 1");
    if (alpha == 1.0)
        return 1.0;
    return alpha / chisq_cdf(chisq_quantile(alpha, p), p + 2);
}

SubsetFit fit_subset(const Eigen::MatrixXd& data, const std::vector<int>& subset)
{
    const auto p = data.cols();
    const auto m = static_cast<Eigen::Index>(subset.size());
    Eigen::MatrixXd rows(m, p);
    for (Eigen::Index i = 0; i < m; ++i)
        rows.row(i) = data.row(subset[i]);

    SubsetFit fit;
    fit.mean = rows.colwise().mean().transpose();
    rows.rowwise() -= fit.mean.transpose();
    fit.cov.noalias() = rows.transpose() * rows;
    fit.cov /= static_cast<double>(m - 1);
    fit.singular = !factor_relative(fit.cov, fit.lower, fit.log_det);
    return fit;
}

std::vector<int> c_step(const Eigen::MatrixXd& data, const SubsetFit& fit, int k)
{
    const auto n = data.rows();
    Eigen::MatrixXd centered = (data.rowwise() - fit.mean.transpose()).transpose();
    fit.lower.triangularView<Eigen::Lower>().solveInPlace(centered);
    const Eigen::VectorXd d2 = centered.colwise().squaredNorm().transpose();

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto closer = [&](int a, int b) { return d2[a] != d2[b] ? d2[a] < d2[b] : a < b; };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), closer);
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

McdFit exact_mcd(const Eigen::MatrixXd& data, const McdConfig& cfg)
{
    check_data(data);
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    if (n > 25)
        throw TooLarge("exact_mcd: n must not exceed 25");
    const int k = subset_size(cfg, n, p);
    if (binomial(n, k) > 1e7L)
        throw TooLarge("exact_mcd: more than 1e7 subsets");

    std::vector<int> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 0);
    Candidate best{std::numeric_limits<double>::infinity(), {}};
    do {
        const SubsetFit fit = fit_subset(data, subset);
        const Candidate c{fit.singular ? kNegInf : fit.log_det, subset};
        if (best.subset.empty() || c.log_det < best.log_det)
            best = c;
    } while (next_combination(subset, n));

    return finish_raw(data, best.subset, cfg);
}

McdFit fast_mcd(const Eigen::MatrixXd& data, const McdConfig& cfg, RngStream& rng)
{
    check_data(data);
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    const int k = subset_size(cfg, n, p);
    if (cfg.n_initial_subsets < 1 || cfg.n_best_kept < 1)
        throw DomainError("fast_mcd: subset counts must be positive");

    if (k == n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return finish_raw(data, all, cfg);
    }

    std::vector<Candidate> candidates;
    std::optional<Candidate> exact;

    // Two C-steps from a nonsingular seed fit; a singular k-subset is an exact fit.
    const auto expand = [&](SubsetFit fit, int steps) {
        std::vector<int> subset;
        double prev = std::numeric_limits<double>::infinity();
        for (int s = 0; s < steps; ++s) {
            subset = c_step(data, fit, k);
            fit = fit_subset(data, subset);
            if (fit.singular) {
                Candidate c{kNegInf, subset};
                if (!exact || better(c, *exact))
                    exact = c;
                return;
            }
            assert(s == 0 || fit.log_det <= prev + 1e-10 * (1.0 + std::abs(prev)));
            prev = fit.log_det;
            (void)prev;
        }
        candidates.push_back({fit.log_det, std::move(subset)});
    };

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    const auto draw_seed = [&] {
        for (int i = 0; i <= p; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
            std::swap(perm[i], perm[j]);
        }
        std::vector<int> seed(perm.begin(), perm.begin() + p + 1);
        std::sort(seed.begin(), seed.end());
        return seed;
    };

    if (cfg.exhaustive_seeds) {
        std::vector<int> seed(static_cast<std::size_t>(p + 1));
        std::iota(seed.begin(), seed.end(), 0);
        do {
            SubsetFit fit = fit_subset(data, seed);
            if (!fit.singular)
                expand(std::move(fit), 2);
        } while (next_combination(seed, n));
    } else {
        long long redraws = 0;
        const long long max_redraws = 100LL * cfg.n_initial_subsets;
        for (int s = 0; s < cfg.n_initial_subsets; ++s) {
            SubsetFit fit = fit_subset(data, draw_seed());
            while (fit.singular && redraws < max_redraws) {
                ++redraws;
                fit = fit_subset(data, draw_seed());
            }
            if (fit.singular)
                break;
            expand(std::move(fit), 2);
        }
    }

    if (candidates.empty() && !exact) {
        // Every seed was degenerate. Grow a random subset to size k; if that is
        // singular too it is an exact fit, otherwise it seeds the C-steps.
        for (int i = 0; i < k; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
            std::swap(perm[i], perm[j]);
        }
        std::vector<int> subset(perm.begin(), perm.begin() + k);
        std::sort(subset.begin(), subset.end());
        SubsetFit fit = fit_subset(data, subset);
        if (fit.singular)
            exact = Candidate{kNegInf, subset};
        else
            expand(std::move(fit), 2);
    }

    if (exact)
        return finish_raw(data, exact->subset, cfg);

    std::sort(candidates.begin(), candidates.end(), better);
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const Candidate& a, const Candidate& b) { return a.subset == b.subset; }),
                     candidates.end());
    const std::size_t kept = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(cfg.n_best_kept));

    Candidate best = candidates.front();
    for (std::size_t c = 0; c < kept; ++c) {
        Candidate cur = candidates[c];
        SubsetFit fit = fit_subset(data, cur.subset);
        for (int s = 0; s < cfg.max_csteps; ++s) {
            std::vector<int> next = c_step(data, fit, k);
            if (next == cur.subset)
                break;
            SubsetFit next_fit = fit_subset(data, next);
            if (next_fit.singular) {
                cur = {kNegInf, std::move(next)};
                break;
            }
            assert(next_fit.log_det <= cur.log_det + 1e-10 * (1.0 + std::abs(cur.log_det)));
            const double rel_change = -std::expm1(next_fit.log_det - cur.log_det);
            cur = {next_fit.log_det, std::move(next)};
            fit = std::move(next_fit);
            if (rel_change < cfg.cstep_tol)
                break;
        }
        if (better(cur, best))
            best = std::move(cur);
    }
    return finish_raw(data, best.subset, cfg);
}

McdFit reweight_mcd(const Eigen::MatrixXd& data, const McdFit& raw, const McdConfig& cfg)
{
    const auto n = data.rows();
    const auto p = data.cols();
    if (raw.mu.size() != p || raw.sigma.rows() != p)
        throw DimensionMismatch("reweight_mcd: raw fit does not match data dimension");

    std::vector<std::uint8_t> weights(static_cast<std::size_t>(n), 0);
    Eigen::MatrixXd lower;
    double unused = 0.0;
    const Eigen::MatrixXd centered = data.rowwise() - raw.mu.transpose();
    if (factor_relative(raw.sigma, lower, unused)) {
        const double cutoff = chisq_quantile(cfg.reweight_delta, static_cast<double>(p));
        Eigen::MatrixXd y = centered.transpose();
        lower.triangularView<Eigen::Lower>().solveInPlace(y);
        const Eigen::VectorXd d2 = y.colwise().squaredNorm().transpose();
        for (Eigen::Index i = 0; i < n; ++i)
            weights[i] = d2[i] <= cutoff ? 1 : 0;
    } else {
        // Exact fit: keep the rows lying in the affine hull of the optimal subset,
        // i.e. with no component along the null space of the raw scatter.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(raw.sigma);
        const Eigen::VectorXd& ev = eig.eigenvalues();
        const double top = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
        std::vector<Eigen::Index> null_dirs;
        for (Eigen::Index j = 0; j < p; ++j)
            if (ev[j] <= 1e-12 * top)
                null_dirs.push_back(j);
        const double scale = 1.0 + raw.mu.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            double off = 0.0;
            for (Eigen::Index j : null_dirs)
                off = std::max(off, std::abs(eig.eigenvectors().col(j).dot(centered.row(i).transpose())));
            weights[i] = off <= 1e-9 * scale ? 1 : 0;
        }
    }

    Eigen::Index used = 0;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < n; ++i)
        if (weights[i]) {
            mu += data.row(i).transpose();
            ++used;
        }
    if (used == 0)
        throw NumericalFailure("reweight_mcd: every observation received weight zero");
    mu /= static_cast<double>(used);

    Eigen::MatrixXd kept(used, p);
    std::vector<int> support;
    support.reserve(static_cast<std::size_t>(used));
    for (Eigen::Index i = 0, r = 0; i < n; ++i)
        if (weights[i]) {
            kept.row(r++) = data.row(i) - mu.transpose();
            support.push_back(static_cast<int>(i));
        }
    const double denom = cfg.reweight_scaling == ReweightScaling::Delta
                             ? static_cast<double>(n)
                             : static_cast<double>(std::max<Eigen::Index>(used - 1, 1));
    Eigen::MatrixXd scatter = (kept.transpose() * kept) / denom;
    const double alpha = cfg.reweight_scaling == ReweightScaling::ObservedFraction
                             ? static_cast<double>(used) / static_cast<double>(n)
                             : cfg.reweight_delta;

    McdFit out;
    out.mu = std::move(mu);
    out.support = std::move(support);
    out.reweighted = true;
    out.weights = std::move(weights);
    out.exact_fit = raw.exact_fit;
    out.factors.raw = raw.factors.raw;
    out.factors.reweighted = cfg.apply_consistency ? mcd_consistency_factor(alpha, static_cast<int>(p)) : 1.0;
    out.log_det = factor_relative(scatter, lower, unused) ? unused : kNegInf;
    out.det = std::exp(out.log_det);
    out.sigma = out.factors.reweighted * scatter;
    return out;
}

} // namespace robvario
