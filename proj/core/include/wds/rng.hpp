#pragma once

#include <cstdint>

namespace wds {

// Deterministic random primitives. All sampling in the library is pinned to
// these exact algorithms so that outputs are reproducible bit-for-bit across
// platforms and thread counts.

/// SplitMix64 output function (finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Stateless hash of a (seed, a, b) counter coordinate. Entry (a, b) of any
/// sampled matrix depends only on these three values, never on the matrix
/// shape or on generation order.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Map a 64-bit word to a double in the open interval (0, 1).
double to_unit_open(std::uint64_t word);

/// Inverse of the standard normal CDF (Wichura's PPND16 rational
/// approximation, relative error below 1e-15 over (0, 1)).
double inverse_normal_cdf(double p);

/// Standard normal deviate for counter (seed, a, b): counter hash -> open
/// uniform -> inverse CDF.
double counter_gaussian(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Sequential SplitMix64 stream, used where a natural counter grid does not
/// exist (shuffles, synthetic-data construction).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double next_unit_open();
    double next_gaussian();

    /// Uniform integer in [0, bound), bound >= 1, by rejection sampling.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

} // namespace wds
