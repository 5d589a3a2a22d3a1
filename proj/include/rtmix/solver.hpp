#pragma once

#include <vector>

#include "rtmix/dataio.hpp"
#include "rtmix/model.hpp"
#include "rtmix/rng.hpp"

namespace rtmix::solver {

/// Per-subject sufficient statistics for the two-condition layout: counts,
/// cell means, and within-cell sums of squares. Everything the penalized
/// normal equations need, independent of the raw trial count.
struct SubjectStats {
    double n0 = 0.0, n1 = 0.0;      // trials in condition 0 / 1
    double mean0 = 0.0, mean1 = 0.0;
    double ss0 = 0.0, ss1 = 0.0;    // within-cell sum of squared deviations
};

/// Collapsed representation of a design: which blocks are present plus the
/// per-subject statistics. has_common adds the shared-effect column nu;
/// has_effdev adds the per-subject effect deviations theta.
struct Collapsed {
    int n_subjects = 0;
    bool has_common = false;
    bool has_effdev = false;
    double n_total = 0.0;
    double n1_total = 0.0;   // trials in condition 1 overall
    double sum_all = 0.0;    // sum of all responses
    double sum1 = 0.0;       // sum of condition-1 responses
    std::vector<SubjectStats> subj;

    std::size_t n_cols() const {
        return 1 + static_cast<std::size_t>(n_subjects) + (has_common ? 1 : 0) +
               (has_effdev ? static_cast<std::size_t>(n_subjects) : 0);
    }
};

/// Collapse a table directly (fast path used by the sampler).
Collapsed collapse(const dataio::TrialTable& t, model::ModelKind kind);

/// Collapse a labeled dense design. Re-derives subject/condition membership
/// from the indicator blocks and checks the structural identity that the
/// shared-effect column equals the row sum of the effect-deviation block.
Collapsed collapse(const model::DesignMatrix& d);

/// The penalized normal equations P = X'X + diag(0, 1/g_alpha ..., 1/g_nu,
/// 1/g_delta ...) factored in arrowhead form: per-subject blocks (alpha_i,
/// theta_i) couple to the global block (mu, nu) only, so factorization,
/// solves, determinant, and exact joint normal draws all cost O(N).
///
/// Typical use: construct once per dataset, then factor(g...) per g value.
/// beta vectors are in design column order: mu, alpha_1..N, nu, theta_1..N
/// (absent blocks skipped).
class ArrowheadSystem {
  public:
    explicit ArrowheadSystem(const Collapsed& c);

    /// Factor for the given g values (absent groups ignored). Returns false
    /// when positivity is lost to rounding (possible only for astronomically
    /// large g, where the system is near-singular along the unidentified
    /// directions); no results are valid in that case.
    bool factor(double g_alpha, double g_nu, double g_delta);

    double logdet() const { return logdet_; }

    /// Penalized least-squares solution (the conditional posterior mean).
    const std::vector<double>& mean() const { return beta_hat_; }

    /// R = SSE(beta_hat) + sum_k beta_hat_k^2 / g_k, assembled from within-
    /// cell sums of squares plus cell-mean misfit so no large-magnitude
    /// cancellation occurs.
    double penalized_rss() const { return rss_; }

    /// SSE and penalty for an arbitrary coefficient vector in design order
    /// (used by the sigma^2 and g conditionals).
    double sse(const std::vector<double>& beta) const;

    /// One exact draw from Normal(mean, sigma^2 * P^{-1}) via the block
    /// Cholesky factors. Consumes normals in a fixed order: the global block
    /// first, then subjects in index order. Requires a successful factor().
    void sample(double sigma, rng::Stream& stream, std::vector<double>& out) const;

  private:
    const Collapsed& c_;
    int ps_;  // subject block size (1 or 2)
    int pg_;  // global block size (1 or 2)
    double g_alpha_ = 1.0, g_nu_ = 1.0, g_delta_ = 1.0;
    double logdet_ = 0.0;
    double rss_ = 0.0;
    std::vector<double> beta_hat_;
    // per-subject scratch: Cholesky of D_i, D_i^{-1} b_i, D_i^{-1} C_i
    std::vector<double> L_;       // ps*ps per subject (lower triangle, row-major)
    std::vector<double> Dinv_b_;  // ps per subject
    std::vector<double> Dinv_C_;  // ps*pg per subject
    double S_chol_[4] = {0, 0, 0, 0};  // Cholesky of the Schur complement
    double zg_[2] = {0, 0};            // global solution (mu, nu)
    bool ok_ = false;

    void compute_rss();
};

}  // namespace rtmix::solver
