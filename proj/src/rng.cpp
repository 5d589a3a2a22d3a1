#include "rtmix/rng.hpp"

#include <cmath>
#include <limits>

#include "rtmix/errors.hpp"

namespace rtmix::rng {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Stream::Stream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
    // xoshiro's all-zero state is absorbing; splitmix64 cannot emit four
    // zeros from one chain, but keep the guard explicit.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t Stream::next_u64() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Stream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_normal_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(angle);
    have_cached_ = true;
    return r * std::cos(angle);
}

double Stream::gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("gamma: shape must be positive");
    if (shape < 1.0) {
        // boost: X ~ Gamma(shape+1), X * U^(1/shape) ~ Gamma(shape)
        double u = uniform_pos();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Stream::chi2_1() {
    double z = normal();
    return z * z;
}

double Stream::truncated_normal(double mean, double sd, double lower) {
    if (!(sd > 0.0)) throw DomainError("truncated_normal: sd must be positive");
    if (lower == -std::numeric_limits<double>::infinity()) return mean + sd * normal();
    double a = (lower - mean) / sd;  // standardized bound
    if (a <= 0.4) {
        // acceptance probability is at least ~0.34, plain rejection is fine
        for (;;) {
            double z = normal();
            if (z > a) return mean + sd * z;
        }
    }
    // Robert (1995): propose a + Exp(lambda), accept with a Gaussian factor.
    double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        double z = a - std::log(uniform_pos()) / lambda;
        double d = z - lambda;
        if (std::log(uniform_pos()) <= -0.5 * d * d) return mean + sd * z;
    }
}

Stream make_stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
    std::uint64_t x = seed;
    std::uint64_t mixed = splitmix64(x);
    x = mixed ^ fnv1a(purpose);
    mixed = splitmix64(x);
    x = mixed ^ index;
    mixed = splitmix64(x);
    return Stream(mixed);
}

}  // namespace rtmix::rng
