#include "robvario/simfield.hpp"

#include "robvario/errors.hpp"

#include <Eigen/Cholesky>

namespace robvario {

Eigen::MatrixXd location_covariance(const AnisoModel& model, int nx, int ny)
{
    const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
    Eigen::MatrixXd cov(n, n);
    // Covariance depends on the offset only; tabulate it once per offset.
    const int wx = 2 * nx - 1;
    Eigen::MatrixXd table(wx, ny);
    for (int dy = 0; dy < ny; ++dy)
        for (int dx = -(nx - 1); dx <= nx - 1; ++dx)
            table(dx + nx - 1, dy) = model_covariance(model, dx, dy);

    for (Eigen::Index i = 0; i < n; ++i) {
        const int xi = static_cast<int>(i % nx), yi = static_cast<int>(i / nx);
        for (Eigen::Index j = i; j < n; ++j) {
            const int xj = static_cast<int>(j % nx), yj = static_cast<int>(j / nx);
            // C(h) = C(-h), so fold the offset onto dy >= 0.
            const int dy = yj - yi;
            const int dx = xj - xi;
            const double c = table(dx + nx - 1, dy);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    return cov;
}

FieldSimulator::FieldSimulator(const FieldSpec& spec) : spec_(spec)
{
    if (spec.nx < 1 || spec.ny < 1)
        throw DomainError("FieldSimulator: grid dimensions must be positive");
    if (static_cast<long>(spec.nx) * spec.ny > spec.max_cells)
        throw TooLarge("FieldSimulator: grid has more than " + std::to_string(spec.max_cells) + " cells");

    const Eigen::MatrixXd cov = location_covariance(spec.model, spec.nx, spec.ny);
    const double variance = 0.5 * spec.model.iso.sill;
    for (double rel = 1e-10; rel <= 1e-6 * (1.0 + 1e-9); rel *= 10.0) {
        const double jitter = rel * variance;
        Eigen::LLT<Eigen::MatrixXd> llt(cov + Eigen::MatrixXd::Identity(cov.rows(), cov.cols()) * jitter);
        if (llt.info() == Eigen::Success) {
            lower_ = llt.matrixL();
            jitter_ = jitter;
            return;
        }
    }
    throw NumericalFailure("FieldSimulator: location covariance is not positive semidefinite");
}

Grid FieldSimulator::simulate(RngStream& rng) const
{
    const Eigen::VectorXd z = normal_stream(rng, lower_.rows());
    Eigen::VectorXd field = lower_.triangularView<Eigen::Lower>() * z;
    field.array() += spec_.mean;
    return Grid(spec_.nx, spec_.ny, std::vector<double>(field.data(), field.data() + field.size()));
}

Grid simulate_field(const FieldSpec& spec, RngStream& rng)
{
    return FieldSimulator(spec).simulate(rng);
}

} // namespace robvario
