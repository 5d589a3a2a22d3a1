#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rtmix::stats {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile function (inverse CDF).
///
/// Acklam's rational approximation refined by one Halley step against the
/// erfc-based CDF; absolute error is near machine precision over (0, 1).
/// Throws DomainError outside (0, 1).
double normal_quantile(double p);

/// Inverse of erfc on (0, 2). erfc_inv(u) = -normal_quantile(u/2) / sqrt(2).
double erfc_inv(double u);

/// Streaming log-sum-exp accumulator for Monte Carlo averages of the form
/// log(mean_i exp(l_i)) where the l_i arrive one at a time and may span
/// hundreds of log-units. Tracks first and second moments in a running
/// rescaled frame so the relative standard error of the mean (= the standard
/// error of the log, by the delta method) is available at the end.
///
/// -inf contributions are legal (they add zero weight) and counted.
class LogSumExp {
  public:
    void add(double log_value);

    std::size_t count() const { return n_; }
    std::size_t count_minus_inf() const { return n_minus_inf_; }

    /// log(sum_i exp(l_i)); -inf if nothing positive was added.
    double log_sum() const;
    /// log(mean) = log_sum - log(count).
    double log_mean() const;
    /// Delta-method standard error of log_mean: sd(w)/(mean(w)*sqrt(n)).
    double log_mean_se() const;

  private:
    std::size_t n_ = 0;
    std::size_t n_minus_inf_ = 0;
    double shift_ = 0.0;   // current rescaling offset (running max)
    double sum_ = 0.0;     // sum of exp(l - shift)
    double sum_sq_ = 0.0;  // sum of exp(2*(l - shift))
};

/// Arithmetic mean; 0 for empty input.
double mean(std::span<const double> xs);

/// Sample variance with the given delta degrees of freedom (default 1).
double variance(std::span<const double> xs, int ddof = 1);

double sd(std::span<const double> xs, int ddof = 1);

/// Sample skewness, g1 = m3 / m2^(3/2) (biased moment form; used only as a
/// distribution-shape check in validation code).
double skewness(std::span<const double> xs);

/// Linear-interpolation quantile of an unsorted sample (copies and sorts).
/// p in [0, 1]; the convention matches the common statistical default where
/// the sample min/max sit at p = 0 and p = 1.
double quantile(std::span<const double> xs, double p);

/// Quantile for data the caller has already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace rtmix::stats
