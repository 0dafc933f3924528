#ifndef ROBVARIO_SCALE_HPP
#define ROBVARIO_SCALE_HPP

#include <span>

namespace robvario {

struct QnConfig {
    double consistency_c = 2.2219;
    bool apply_consistency = true;
    /// Multiply by the small-sample factor d_n of Croux and Rousseeuw (1992).
    bool small_sample_correction = false;
};

/// d_n: tabulated for n <= 9, n/(n+1.4) for odd and n/(n+3.8) for even n beyond.
double qn_small_sample_factor(long long n);

/// Order index k = C(floor(N/2) + 1, 2) of the Qn pairwise-difference statistic.
long long qn_order(long long n);

/// k-th smallest of the N(N-1)/2 absolute pairwise differences.
/// O(N log N) selection without materializing the differences.
double qn_raw(std::span<const double> sample);

/// qn_raw times the Gaussian consistency constant when enabled.
/// No finite-sample correction is applied.
double qn(std::span<const double> sample, const QnConfig& cfg = {});

} // namespace robvario

#endif // ROBVARIO_SCALE_HPP
