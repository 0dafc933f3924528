#ifndef ROBVARIO_SIMFIELD_HPP
#define ROBVARIO_SIMFIELD_HPP

#include "robvario/grid.hpp"
#include "robvario/rng.hpp"
#include "robvario/variomodel.hpp"

#include <Eigen/Core>

namespace robvario {

struct FieldSpec {
    AnisoModel model;
    int nx = 15;
    int ny = 15;
    double mean = 0.0;
    int max_cells = 10000;
};

/// Dense covariance of all grid locations, indexed like Grid storage.
Eigen::MatrixXd location_covariance(const AnisoModel& model, int nx, int ny);

/// Exact Gaussian field sampler: mean + L * z with L the Cholesky factor of
/// the location covariance.
///
/// The factor is computed once at construction and is read-only afterwards,
/// so one simulator can serve many threads, each with its own RngStream.
/// Rounding can leave the spherical covariance a hair short of positive
/// definite; the diagonal is jittered by 1e-10 * sill/2, escalating tenfold
/// up to 1e-6 * sill/2, before giving up.
class FieldSimulator {
public:
    explicit FieldSimulator(const FieldSpec& spec);

    const FieldSpec& spec() const noexcept { return spec_; }
    double jitter() const noexcept { return jitter_; }
    const Eigen::MatrixXd& factor() const noexcept { return lower_; }

    Grid simulate(RngStream& rng) const;

private:
    FieldSpec spec_;
    Eigen::MatrixXd lower_;
    double jitter_ = 0.0;
};

Grid simulate_field(const FieldSpec& spec, RngStream& rng);

} // namespace robvario

#endif // ROBVARIO_SIMFIELD_HPP
