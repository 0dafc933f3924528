#ifndef ROBVARIO_MCD_HPP
#define ROBVARIO_MCD_HPP

#include "robvario/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace robvario {

/// Scaling of the reweighted scatter.
///   Delta:            (1/n) * sum of kept outer products, times c(reweight_delta, p)
///   KeptCovariance:   sample covariance of the kept rows (denominator sum(w) - 1), times c(reweight_delta, p)
///   ObservedFraction: sample covariance of the kept rows, times c(sum(w)/n, p)
enum class ReweightScaling { Delta, KeptCovariance, ObservedFraction };

struct McdConfig {
    /// Explicit subset size; when unset it is derived from `alpha`.
    std::optional<int> k;
    /// Subset fraction. 0.5 gives k = floor((n+p+1)/2), the maximal-breakdown choice.
    double alpha = 0.5;
    int n_initial_subsets = 500;
    int n_best_kept = 10;
    int max_csteps = 100;
    double cstep_tol = 1e-12;
    bool apply_consistency = true;
    double reweight_delta = 0.975;
    ReweightScaling reweight_scaling = ReweightScaling::KeptCovariance;
    /// Use every (p+1)-subset as a seed instead of random draws (small n only).
    bool exhaustive_seeds = false;
};

/// Subset size for n observations in dimension p: cfg.k when given, else
/// floor(2*h - n + 2*(n - h)*alpha) with h = floor((n+p+1)/2).
int subset_size(const McdConfig& cfg, int n, int p);

/// c = alpha / F_{chi2, p+2}(chi2_{p, alpha}); 1 at alpha = 1.
double mcd_consistency_factor(double alpha, int p);

struct McdFactors {
    double raw = 1.0;
    double reweighted = 1.0;
};

struct McdFit {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    /// Sorted row indices of the optimal k-subset.
    std::vector<int> support;
    /// Determinant of the unscaled support covariance.
    double det = 0.0;
    double log_det = 0.0;
    bool reweighted = false;
    /// Hard-rejection weights of the reweighting step (empty for raw fits).
    std::vector<std::uint8_t> weights;
    McdFactors factors;
    /// True when some k-subset had a singular covariance; that subset is then optimal.
    bool exact_fit = false;
};

/// Mean and (k-1)-denominator covariance of a row subset, with its log-determinant.
struct SubsetFit {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    /// Cholesky factor of cov, valid when !singular.
    Eigen::MatrixXd lower;
    double log_det = 0.0;
    bool singular = false;
};

SubsetFit fit_subset(const Eigen::MatrixXd& data, const std::vector<int>& subset);

/// One concentration step: rank all rows by Mahalanobis distance under `fit`
/// and return the k closest, ties broken by row index, sorted ascending.
std::vector<int> c_step(const Eigen::MatrixXd& data, const SubsetFit& fit, int k);

/// Global MCD by enumerating every k-subset; guarded to n <= 25 and C(n,k) <= 1e7.
McdFit exact_mcd(const Eigen::MatrixXd& data, const McdConfig& cfg = {});

/// FAST-MCD: random (p+1)-seeds, two C-steps each, then the best few
/// candidates iterated to convergence.
McdFit fast_mcd(const Eigen::MatrixXd& data, const McdConfig& cfg, RngStream& rng);

/// One-step hard-rejection reweighting of a raw fit.
McdFit reweight_mcd(const Eigen::MatrixXd& data, const McdFit& raw, const McdConfig& cfg = {});

} // namespace robvario

#endif // ROBVARIO_MCD_HPP
