#ifndef ROBVARIO_RNG_HPP
#define ROBVARIO_RNG_HPP

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>

namespace robvario {

/// Seeded random stream identified by (seed, stream_id).
///
/// The engine is a 64-bit Mersenne twister initialised through std::seed_seq
/// from both words, so the output sequence is fixed by the standard and
/// identical on every platform. Uniform and normal transforms are done here
/// rather than with <random> distributions, whose output is unspecified.
/// A stream is stateful; do not share one across threads.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer on [0, bound); rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Marsaglia's polar method.
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// n standard-normal variates drawn from `rng`.
Eigen::VectorXd normal_stream(RngStream& rng, Eigen::Index n);

} // namespace robvario

#endif // ROBVARIO_RNG_HPP
