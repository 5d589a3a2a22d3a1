#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtmix/gibbs.hpp"
#include "rtmix/model.hpp"

namespace rtmix::evidence {

/// Marginal likelihood estimate for one design, integrated over its g priors
/// by Monte Carlo. n_degenerate counts prior g draws so extreme that the
/// near-singular system lost positivity; such draws contribute zero weight
/// (their true contribution is negligible) and are surfaced here rather than
/// hidden.
struct LogMarginal {
    model::ModelKind model = model::ModelKind::Null;
    double logml = 0.0;
    double mc_se = 0.0;
    long n_mc = 0;
    long n_degenerate = 0;
};

/// Ratio of posterior to prior probability that every subject effect is
/// positive, with the raw counts kept so the defining identity
/// bf = posterior_fraction / prior_fraction can be checked exactly in
/// integer arithmetic. The interval is a binomially propagated 95% band on
/// the log ratio.
struct EncompassingResult {
    double bf_plus_u = 0.0;
    double posterior_fraction = 0.0;
    double prior_fraction = 0.0;
    double lo = 0.0, hi = 0.0;
    long k_post = 0, n_post = 0;
    long k_prior = 0, n_prior = 0;
};

/// Monte Carlo sizes and model prior odds for a full comparison.
struct EvidenceConfig {
    long n_mc = 100000;          // g draws per marginal likelihood
    long n_prior_draws = 1000000;  // prior simulations for the constraint fraction
    double prior_odds = 1.0;     // positive-effects vs unconstrained
    std::uint64_t seed = 1;
};

/// Full pairwise comparison. Natural-log Bayes factors are primary (the
/// ratios can exceed double range in principle); serialization adds log10
/// and plain ratios. Winner selection: the positive-effects model beats the
/// unconstrained parent iff bf_plus_u > 1 (ties go to the parent); the
/// survivor then plays the common-effect and null models on marginal
/// likelihood, with log ml(positive) = log ml(unconstrained) + log bf_plus_u.
struct BfReport {
    EncompassingResult enc;
    double posterior_prob_plus = 0.0;
    double log_bf_u_1 = 0.0;
    double log_bf_u_0 = 0.0;
    LogMarginal ml_u, ml_1, ml_0;
    model::ModelKind winner = model::ModelKind::Unconstrained;
};

/// Exact log marginal likelihood conditional on g (flat intercept, Jeffreys
/// residual variance, Gaussian coefficient integral in closed form):
///   lgamma((n-1)/2) - (n-1)/2 * log(pi * R) - (sum_pen log g + logdet P)/2
/// with P the penalized normal equations and R the penalized residual sum
/// of squares at the ridge solution, both through the block-structured
/// solver. g holds one entry per g group in (alpha, nu, delta) order.
double log_marginal_given_g(const model::DesignMatrix& d, const std::vector<double>& g);

/// Monte Carlo marginal over g ~ InverseChiSq(1, r^2) priors via streaming
/// log-sum-exp; standard error by the delta method on the log. Deterministic
/// given the seed. Requires n_mc >= 10^4.
LogMarginal log_marginal(const model::DesignMatrix& d, const model::PriorConfig& p, long n_mc,
                         std::uint64_t seed);

/// Posterior and prior probabilities of the all-effects-positive event.
/// The posterior side counts retained draws with min_i delta_i > 0; the
/// prior side simulates (g_nu, g_delta) -> nu -> delta_1..N from the priors
/// (the trial variance scales out of the sign event, so sigma = 1 is used
/// without loss). Throws UnstableEstimateError when no prior draw satisfies
/// the constraint.
EncompassingResult encompassing_bf(const gibbs::PosteriorDraws& draws,
                                   const model::PriorConfig& p, int n_subjects,
                                   long n_prior_draws, std::uint64_t seed);

/// Fit the unconstrained model, run the encompassing count, evaluate the
/// three marginal likelihoods, and assemble the report. When out_draws is
/// non-null the posterior draws used internally are moved there so callers
/// can reuse them for summaries without refitting.
BfReport compare_models(const dataio::TrialTable& t, const model::PriorConfig& p,
                        const gibbs::McmcConfig& m, const EvidenceConfig& ev,
                        gibbs::PosteriorDraws* out_draws = nullptr);

/// Human-readable report and machine key=value form (log10 alongside
/// natural log throughout).
void write_bf_report_text(const std::string& path, const BfReport& r);
void write_bf_report_kv(const std::string& path, const BfReport& r);

}  // namespace rtmix::evidence
