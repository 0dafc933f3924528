#include "robvario/numerics.hpp"

#include <cmath>
#include <limits>

namespace robvario {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 10000;

double log_gamma_prefactor(double a, double x)
{
    return a * std::log(x) - x - std::lgamma(a);
}

double gamma_p_series(double a, double x)
{
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            break;
    }
    return sum * std::exp(log_gamma_prefactor(a, x));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x)
{
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps)
            break;
    }
    return std::exp(log_gamma_prefactor(a, x)) * h;
}

double chisq_pdf(double x, double df)
{
    if (x <= 0.0)
        return 0.0;
    const double k = 0.5 * df;
    return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - std::lgamma(k));
}

} // namespace

double regularized_gamma_p(double a, double x)
{
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("regularized_gamma_p: requires a > 0 and x >= 0");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double chisq_cdf(double x, double df)
{
    if (!(df > 0.0))
        throw DomainError("chisq_cdf: degrees of freedom must be positive");
    if (!(x >= 0.0))
        throw DomainError("chisq_cdf: x must be nonnegative");
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chisq_quantile(double p, double df)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("chisq_quantile: p must lie in (0, 1)");
    if (!(df > 0.0))
        throw DomainError("chisq_quantile: degrees of freedom must be positive");

    double lo = 0.0;
    double hi = std::max(1.0, df);
    while (chisq_cdf(hi, df) < p)
        hi *= 2.0;

    // Shrink the bracket far enough that Newton cannot wander.
    for (int i = 0; i < 200 && hi - lo > 1e-6 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (chisq_cdf(mid, df) < p ? lo : hi) = mid;
    }

    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 50; ++i) {
        const double f = chisq_cdf(x, df) - p;
        if (std::abs(f) < 1e-15)
            break;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        const double dens = chisq_pdf(x, df);
        double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 1e-15 * (1.0 + x))
            break;
    }
    return x;
}

double pairwise_sum(const double* first, std::size_t count)
{
    if (count == 0)
        return 0.0;
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i)
            s += first[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(first, half) + pairwise_sum(first + half, count - half);
}

} // namespace robvario
