#include "robvario/scale.hpp"

#include "robvario/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace robvario {

long long qn_order(long long n)
{
    const long long h = n / 2 + 1;
    return h * (h - 1) / 2;
}

namespace {

// Weighted high median: smallest x[i] whose cumulative weight (values sorted) exceeds half the total.
double weighted_high_median(std::vector<std::pair<double, long long>>& items)
{
    std::sort(items.begin(), items.end());
    long long total = 0;
    for (const auto& it : items)
        total += it.second;
    long long acc = 0;
    for (const auto& it : items) {
        acc += it.second;
        if (2 * acc > total)
            return it.first;
    }
    return items.back().first;
}

} // namespace

// Croux & Rousseeuw's O(n log n) selection over the implicit matrix of
// differences y[i] - y[n-j+1] of the sorted sample (1-based indices below).
double qn_raw(std::span<const double> sample)
{
    const long long n = static_cast<long long>(sample.size());
    if (n < 2)
        throw DomainError("qn: sample must contain at least two values");
    std::vector<double> y(static_cast<std::size_t>(n) + 1);
    for (long long i = 0; i < n; ++i) {
        if (!std::isfinite(sample[static_cast<std::size_t>(i)]))
            throw DomainError("qn: non-finite value in sample");
        y[static_cast<std::size_t>(i) + 1] = sample[static_cast<std::size_t>(i)];
    }
    std::sort(y.begin() + 1, y.end());

    const auto idx = [](long long i) { return static_cast<std::size_t>(i); };
    std::vector<long long> left(idx(n) + 1), right(idx(n) + 1), P(idx(n) + 1), Q(idx(n) + 1);
    for (long long i = 1; i <= n; ++i) {
        left[idx(i)] = n - i + 2;
        right[idx(i)] = n;
    }
    const long long knew = qn_order(n) + n * (n + 1) / 2;
    long long nL = n * (n + 1) / 2;
    long long nR = n * n;

    std::vector<std::pair<double, long long>> work;
    while (nR - nL > n) {
        work.clear();
        for (long long i = 2; i <= n; ++i)
            if (left[idx(i)] <= right[idx(i)]) {
                const long long w = right[idx(i)] - left[idx(i)] + 1;
                const long long mid = left[idx(i)] + w / 2;
                work.emplace_back(y[idx(i)] - y[idx(n + 1 - mid)], w);
            }
        const double trial = weighted_high_median(work);

        long long j = 0;
        for (long long i = n; i >= 1; --i) {
            while (j < n && y[idx(i)] - y[idx(n - j)] < trial)
                ++j;
            P[idx(i)] = j;
        }
        j = n + 1;
        for (long long i = 1; i <= n; ++i) {
            while (y[idx(i)] - y[idx(n - j + 2)] > trial)
                --j;
            Q[idx(i)] = j;
        }
        long long sum_p = 0, sum_q = 0;
        for (long long i = 1; i <= n; ++i) {
            sum_p += P[idx(i)];
            sum_q += Q[idx(i)] - 1;
        }
        if (knew <= sum_p) {
            right = P;
            nR = sum_p;
        } else if (knew > sum_q) {
            for (long long i = 1; i <= n; ++i)
                left[idx(i)] = Q[idx(i)];
            nL = sum_q;
        } else {
            return trial;
        }
    }

    std::vector<double> rest;
    for (long long i = 2; i <= n; ++i)
        for (long long jj = left[idx(i)]; jj <= right[idx(i)]; ++jj)
            rest.push_back(y[idx(i)] - y[idx(n - jj + 1)]);
    const auto nth = rest.begin() + static_cast<std::ptrdiff_t>(knew - nL - 1);
    std::nth_element(rest.begin(), nth, rest.end());
    return *nth;
}

double qn_small_sample_factor(long long n)
{
    if (n < 2)
        throw DomainError("qn: sample must contain at least two values");
    static constexpr double kSmall[] = {0.399, 0.994, 0.512, 0.844, 0.611, 0.857, 0.669, 0.872};
    if (n <= 9)
        return kSmall[n - 2];
    const double dn = static_cast<double>(n);
    return n % 2 == 1 ? dn / (dn + 1.4) : dn / (dn + 3.8);
}

double qn(std::span<const double> sample, const QnConfig& cfg)
{
    double s = qn_raw(sample);
    if (cfg.apply_consistency)
        s *= cfg.consistency_c;
    if (cfg.small_sample_correction)
        s *= qn_small_sample_factor(static_cast<long long>(sample.size()));
    return s;
}

} // namespace robvario
