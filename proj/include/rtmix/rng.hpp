#pragma once

#include <cstdint>
#include <string_view>

namespace rtmix::rng {

/// Deterministic, portable random number generation.
///
/// Core generator: xoshiro256++ (Blackman & Vigna). State is four 64-bit
/// words; output is rotl(s0 + s3, 23) + s0. The generator is seeded through
/// a splitmix64 chain so any 64-bit seed yields a well-mixed nonzero state.
/// All distributions below are implemented in this file from uniform bits
/// only, so streams are bit-reproducible across platforms and compilers
/// (IEEE-754 doubles, no library distribution functions involved).
///
/// Independent streams are derived, not jumped: make_stream(seed, purpose,
/// index) hashes the purpose label (FNV-1a) and index into the seed via
/// splitmix64 rounds. Distinct (purpose, index) pairs give statistically
/// independent streams for any fixed user seed.
class Stream {
  public:
    /// Raw construction from a 64-bit seed (splitmix64-expanded).
    explicit Stream(std::uint64_t seed);

    /// Next raw 64 bits.
    std::uint64_t next_u64();

    /// Uniform on [0, 1): 53 high bits scaled by 2^-53.
    double uniform();

    /// Uniform on (0, 1): never returns 0 (safe under log()).
    double uniform_pos();

    /// Standard normal via Box-Muller; generates pairs, caches the second.
    double normal();

    /// Gamma(shape, rate 1), shape > 0. Marsaglia-Tsang squeeze for
    /// shape >= 1; boosted by U^(1/shape) below 1.
    double gamma(double shape);

    /// Chi-square with 1 degree of freedom (a squared standard normal).
    double chi2_1();

    /// Normal(mean, sd^2) conditioned on the value exceeding `lower`.
    /// Plain rejection near the bulk; for a standardized bound above 0.4
    /// switches to Robert's translated-exponential rejection, which stays
    /// O(1) arbitrarily far into the tail.
    double truncated_normal(double mean, double sd, double lower);

  private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool have_cached_ = false;
};

/// Derive the stream for a named purpose ("chain", "marginal", ...) and index
/// under the given user seed. Same triple, same stream, on every platform.
Stream make_stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index);

}  // namespace rtmix::rng
