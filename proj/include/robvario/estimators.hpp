#ifndef ROBVARIO_ESTIMATORS_HPP
#define ROBVARIO_ESTIMATORS_HPP

#include "robvario/grid.hpp"
#include "robvario/mcd.hpp"
#include "robvario/rng.hpp"
#include "robvario/scale.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace robvario {

enum class EstimatorId {
    Matheron,
    Genton,
    McdOrg,
    McdOrgRe,
    McdDiff,
    McdDiffRe,
    McdOrgMod,
    McdOrgModRe,
    McdDiffMod,
    McdDiffModRe,
};

std::string to_string(EstimatorId id);
EstimatorId parse_estimator(std::string_view text);
std::vector<EstimatorId> parse_estimator_list(std::string_view comma_separated);

enum class VectorKind { Org, Diff };

bool is_mcd(EstimatorId id);
bool is_reweighted(EstimatorId id);
bool is_mod(EstimatorId id);
VectorKind vector_kind(EstimatorId id);

/// Directional estimate of the variogram 2*gamma at h_1..h_{h_max}.
struct VariogramEstimate {
    std::string estimator_id;
    LagSet lags;
    Eigen::VectorXd values;
    /// Pairs (Matheron, Genton) or vectors (MCD) behind each lag.
    std::vector<long> counts;
    std::optional<double> correction_applied;

    Direction direction() const noexcept { return lags.direction; }
};

/// Dependence ranges for the averaged non-overlapping (".mod") estimators.
/// A partition contributes only if it holds more than 2*h_max vectors.
struct ModConfig {
    int m_x = 0;
    int m_y = 0;
    bool average_partitions = true;
};

struct EstimatorOptions {
    McdConfig mcd;
    QnConfig qn;
    ModConfig mod;
    /// Report MCD.org variants without their largest lag.
    bool drop_largest_lag = false;
};

VariogramEstimate matheron(const Grid& g, const LagSet& lags);
VariogramEstimate genton(const Grid& g, const LagSet& lags, const QnConfig& cfg = {});

/// Variogram implied by a fitted scatter matrix: its diagonal for difference
/// vectors; for original-data vectors 2*(a0 - a_l) with a0 the mean diagonal
/// and a_l the mean of the l-th off-diagonal.
Eigen::VectorXd variogram_from_scatter(const Eigen::MatrixXd& sigma, VectorKind kind);

VariogramEstimate mcd_diff(const Grid& g, const LagSet& lags, const McdConfig& cfg, bool reweight, RngStream& rng);
VariogramEstimate mcd_org(const Grid& g, const LagSet& lags, const McdConfig& cfg, bool reweight, RngStream& rng);

/// Raw and reweighted estimates sharing one FAST-MCD fit.
std::pair<VariogramEstimate, VariogramEstimate> mcd_raw_and_reweighted(const Grid& g, const LagSet& lags,
                                                                       VectorKind kind, const McdConfig& cfg,
                                                                       RngStream& rng);

/// floor((n - h_max - 1) / (h_max + 1 + m) + 1): non-overlapping vectors along a line of n cells.
int non_overlapping_count(int n, int h_max, int m);

/// Base locations of every partition into non-overlapping vectors, line offset
/// outer and start offset inner. Only EW and SN are supported.
std::vector<std::vector<Cell>> mod_partitions(int nx, int ny, const LagSet& lags, const ModConfig& mod);

VariogramEstimate mcd_mod(const Grid& g, const LagSet& lags, VectorKind kind, const ModConfig& mod,
                          const McdConfig& cfg, bool reweight, RngStream& rng);

/// Run any estimator by id.
VariogramEstimate estimate(EstimatorId id, const Grid& g, const LagSet& lags, const EstimatorOptions& opts,
                           RngStream& rng);

} // namespace robvario

#endif // ROBVARIO_ESTIMATORS_HPP
