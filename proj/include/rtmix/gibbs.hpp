#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtmix/dataio.hpp"
#include "rtmix/model.hpp"
#include "rtmix/rng.hpp"

namespace rtmix::gibbs {

/// Chain layout. Retained draws per chain = (n_iterations - burn_in) / thin
/// and must come out to at least 100.
///
/// frozen_g is a test hook: when set, the three variance ratios are clamped
/// to the given (g_alpha, g_nu, g_delta) and their update step is skipped,
/// which reduces the sampler to the exactly solvable conditional model.
struct McmcConfig {
    int n_chains = 4;
    long n_iterations = 5000;
    long burn_in = 1000;
    long thin = 1;
    std::uint64_t seed = 1;
    std::optional<std::array<double, 3>> frozen_g;

    long retained_per_chain() const { return (n_iterations - burn_in) / thin; }
    void validate() const;
};

/// Posterior draws in structure-of-arrays form, merged across chains in
/// (chain, draw) order. delta[i] is stored as the rounded sum nu + theta[i]
/// of the same draw; eta2 as g_delta * sigma2.
struct PosteriorDraws {
    int n_subjects = 0;
    std::vector<int> chain_id;     // 1-based
    std::vector<long> draw_index;  // 0-based within chain
    std::vector<double> mu, nu, sigma2, g_alpha, g_nu, g_delta, eta2;
    std::vector<double> alpha, theta, delta;  // flattened, stride n_subjects

    std::size_t n_draws() const { return mu.size(); }
    double alpha_at(std::size_t d, int i) const { return alpha[d * n_subjects + i]; }
    double theta_at(std::size_t d, int i) const { return theta[d * n_subjects + i]; }
    double delta_at(std::size_t d, int i) const { return delta[d * n_subjects + i]; }

    /// One parameter's draws for a single chain, in draw order (diagnostics
    /// and tests). Column names as in write_draws.
    std::vector<double> chain_column(const std::string& name, int chain) const;
    std::vector<std::string> column_names() const;
};

/// Split-Rhat and effective sample size per scalar parameter.
struct Diagnostics {
    struct Entry {
        std::string name;
        double rhat;
        double ess;
    };
    std::vector<Entry> entries;
};

/// Sample the joint posterior of the unconstrained hierarchy on the table's
/// scale. Each sweep draws (a) the full location block (mu, alpha, nu,
/// theta) jointly from its multivariate normal conditional through the
/// arrowhead factorization, (b) sigma^2 from its inverse-gamma conditional
/// including the coefficient prior sums of squares, (c) each g from its
/// inverse-gamma conditional with shape (k+1)/2 for a k-coefficient group.
/// Chains own streams derived from (seed, chain); the merge order and every
/// draw are bit-deterministic for a fixed config.
PosteriorDraws gibbs_fit(const dataio::TrialTable& t, const model::PriorConfig& p,
                         const McmcConfig& m);

/// Rank-normalized split-Rhat and bulk effective sample size for mu, nu,
/// sigma^2, the three g's, and each delta_i. Throws DomainError with fewer
/// than two chains.
Diagnostics diagnose(const PosteriorDraws& d);

/// Draw from Normal(mean, sd^2) conditioned on the value exceeding `lower`;
/// tail-safe arbitrarily far above the mean. Needed by the generator for
/// the positive-effects model and exposed for reuse.
double sample_truncated_normal(double mean, double sd, double lower, rng::Stream& stream);

/// Delimited export, one row per draw, with a fixed documented column order
/// (chain, draw, mu, nu, sigma2, g_alpha, g_nu, g_delta, eta2, alpha_*,
/// theta_*, delta_*). Values round-trip exactly through read_draws.
void write_draws(const std::string& path, const PosteriorDraws& d);
PosteriorDraws read_draws(const std::string& path);

void write_diagnostics(const std::string& path, const Diagnostics& diag);

}  // namespace rtmix::gibbs
