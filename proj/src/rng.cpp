#include "robvario/rng.hpp"

#include <cmath>

namespace robvario {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                      0x9e3779b9u};
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id))
{
}

double RngStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t bound)
{
    if (bound <= 1)
        return 0;
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % bound;
}

double RngStream::normal()
{
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return u * f;
}

Eigen::VectorXd normal_stream(RngStream& rng, Eigen::Index n)
{
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = rng.normal();
    return out;
}

} // namespace robvario
