#ifndef ROBVARIO_STUDY_HPP
#define ROBVARIO_STUDY_HPP

#include "robvario/contamination.hpp"
#include "robvario/estimators.hpp"
#include "robvario/simfield.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace robvario {

/// Divisor of the lag average in the correction factor: the printed formula
/// divides the (h_max - 1)-term sum by h_max, an average divides by h_max - 1.
enum class CorrfacDivisor { HMax, HMaxMinus1 };

using EstimatorKey = std::pair<EstimatorId, Direction>;

/// Replaces the built-in estimator dispatch (tests use it to stub estimators).
using EstimatorFn = std::function<VariogramEstimate(EstimatorId, const Grid&, const LagSet&, RngStream&)>;

struct StudySpec {
    FieldSpec field;
    std::vector<LagSet> lag_sets;
    std::vector<EstimatorId> estimators;
    std::optional<ContaminationSpec> contamination;
    int replications = 1000;
    std::uint64_t base_seed = 1;
    CorrfacDivisor corrfac_divisor = CorrfacDivisor::HMaxMinus1;
    /// Multiplies 2*gamma-hat of the matching estimator and direction.
    std::map<EstimatorKey, double> correction_factors;
    EstimatorOptions options;
    /// 0 uses std::thread::hardware_concurrency().
    int threads = 0;
    /// A study aborts when more than this fraction of replications fail for some estimator.
    double max_failure_fraction = 0.01;
    EstimatorFn estimator_override;
};

/// Offset added to the replication index for the contamination/MCD stream.
inline constexpr std::uint64_t kAuxStreamOffset = std::uint64_t{1} << 32;

/// Per-replication semivariogram estimates, indexed by replication.
struct ReplicationTable {
    std::vector<EstimatorKey> keys;
    std::vector<LagSet> lag_sets; // parallel to keys
    /// results[key][replication]; empty optional marks a failed replication.
    std::vector<std::vector<std::optional<Eigen::VectorXd>>> results;
};

/// Runs spec.replications simulated fields through every estimator and direction.
/// Replication r draws the field from stream r and contamination and MCD seeds
/// from stream r + 2^32; output is identical for any thread count.
ReplicationTable run_replications(const StudySpec& spec);

struct CellStats {
    EstimatorId estimator;
    Direction direction;
    int lag = 0;
    double truth = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double variance = 0.0;
    double se_bias = 0.0;
    double se_rmse = 0.0;
    int n_ok = 0;
    int n_fail = 0;
};

struct CorrectionFactor {
    EstimatorId estimator;
    Direction direction;
    double c_opt = 1.0;
    double se = 0.0;
    int n_ok = 0;
    int n_fail = 0;
};

struct StudyResult {
    std::vector<CellStats> cells;
    std::vector<CorrectionFactor> factors;

    const CellStats& cell(EstimatorId id, Direction d, int lag) const;
    const CorrectionFactor& factor(EstimatorId id, Direction d) const;
};

/// Semivariogram ratios gamma-hat/gamma averaged over replications and lags
/// 1..h_max-1, divided by the chosen divisor, then inverted.
std::vector<CorrectionFactor> summarize_correction_factors(const StudySpec& spec, const ReplicationTable& table);

/// Bias, rMSE and Monte-Carlo standard errors on the semivariogram scale.
std::vector<CellStats> summarize_bias_rmse(const StudySpec& spec, const ReplicationTable& table);

std::vector<CorrectionFactor> run_correction_factor_study(const StudySpec& spec);
StudyResult run_bias_rmse_study(const StudySpec& spec);

/// estimator,direction,lag,bias,rmse,se_bias,se_rmse,n_ok,n_fail; `scale` multiplies the four statistics.
void write_bias_rmse_csv(std::ostream& os, const std::vector<CellStats>& cells, double scale = 1.0);
/// estimator,direction,c_opt,se
void write_correction_csv(std::ostream& os, const std::vector<CorrectionFactor>& factors);
std::map<EstimatorKey, double> read_correction_csv(std::istream& is);

} // namespace robvario

#endif // ROBVARIO_STUDY_HPP
