#ifndef ROBVARIO_NUMERICS_HPP
#define ROBVARIO_NUMERICS_HPP

#include "robvario/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <string>

namespace robvario {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Regularized lower incomplete gamma function P(a, x).
///
/// Series expansion below x < a + 1, Lentz continued fraction for Q(a, x)
/// above. Accurate to a few ulps of 1e-15 over the ranges used here.
double regularized_gamma_p(double a, double x);

/// Distribution function of the chi-square law with `df` degrees of freedom.
double chisq_cdf(double x, double df);

/// Inverse of chisq_cdf in x: bracketed bisection polished by Newton steps.
double chisq_quantile(double p, double df);

/// Pivot threshold used by cholesky_factor: 1e-12 * trace(A) / dim.
template <typename Derived>
typename Derived::Scalar pivot_tolerance(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    return Scalar(1e-12) * std::abs(a.trace()) / Scalar(a.rows());
}

/// Lower-triangular L with L * L^T = A.
///
/// A must be square and symmetric. A pivot L(i,i)^2 at or below
/// pivot_tolerance(A) raises NotPositiveDefinite.
template <typename Derived>
Matrix<typename Derived::Scalar> cholesky_factor(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols() || a.rows() < 1)
        throw DimensionMismatch("cholesky_factor: matrix must be square and non-empty");

    const Scalar scale = Scalar(1) + a.cwiseAbs().maxCoeff();
    if (((a - a.transpose()).cwiseAbs().maxCoeff()) > Scalar(1e-12) * scale)
        throw DomainError("cholesky_factor: matrix is not symmetric");

    const Scalar tol = pivot_tolerance(a);
    Eigen::LLT<Matrix<Scalar>> llt(a.derived());
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("cholesky_factor: matrix is not positive definite");

    Matrix<Scalar> lower = llt.matrixL();
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        if (lower(i, i) * lower(i, i) <= tol)
            throw NotPositiveDefinite("cholesky_factor: pivot " + std::to_string(i) + " below tolerance");
    }
    return lower;
}

/// Squared Mahalanobis distance given a Cholesky factor of the scatter.
template <typename DerivedX, typename DerivedMu, typename DerivedL>
typename DerivedX::Scalar mahalanobis_sq_factored(const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedMu>& mu,
                                                  const Eigen::MatrixBase<DerivedL>& lower)
{
    if (x.size() != mu.size() || x.size() != lower.rows())
        throw DimensionMismatch("mahalanobis_sq: dimensions disagree");
    Vector<typename DerivedX::Scalar> r = x - mu;
    lower.template triangularView<Eigen::Lower>().solveInPlace(r);
    return r.squaredNorm();
}

/// (x - mu)^T Sigma^{-1} (x - mu) via a triangular solve; no explicit inverse.
template <typename DerivedX, typename DerivedMu, typename DerivedS>
typename DerivedX::Scalar mahalanobis_sq(const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedMu>& mu,
                                         const Eigen::MatrixBase<DerivedS>& sigma)
{
    if (x.size() != mu.size() || sigma.rows() != x.size() || sigma.cols() != x.size())
        throw DimensionMismatch("mahalanobis_sq: dimensions disagree");
    return mahalanobis_sq_factored(x, mu, cholesky_factor(sigma));
}

/// Sum in fixed pairwise order; result depends only on the sequence order.
double pairwise_sum(const double* first, std::size_t count);

} // namespace robvario

#endif // ROBVARIO_NUMERICS_HPP
