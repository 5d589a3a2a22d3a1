#include "rtmix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtmix/errors.hpp"

namespace rtmix::stats {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Acklam's rational starting point for the normal quantile.
double acklam(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
    double x = acklam(p);
    // One Halley refinement against the erfc-based CDF pushes the rational
    // approximation's ~1e-9 error down to machine precision.
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

double erfc_inv(double u) {
    if (!(u > 0.0 && u < 2.0)) throw DomainError("erfc_inv: argument must lie in (0, 2)");
    return -normal_quantile(u / 2.0) / std::sqrt(2.0);
}

void LogSumExp::add(double log_value) {
    ++n_;
    if (log_value == -kInf) {
        ++n_minus_inf_;
        return;
    }
    if (!(log_value < kInf)) throw NumericError("LogSumExp: non-finite contribution");
    if (log_value > shift_ && sum_ == 0.0) {
        // first finite term sets the frame
        shift_ = log_value;
    } else if (log_value > shift_) {
        // rescale running sums into the new frame
        double f = std::exp(shift_ - log_value);
        sum_ *= f;
        sum_sq_ *= f * f;
        shift_ = log_value;
    }
    double w = std::exp(log_value - shift_);
    sum_ += w;
    sum_sq_ += w * w;
}

double LogSumExp::log_sum() const {
    if (sum_ == 0.0) return -kInf;
    return shift_ + std::log(sum_);
}

double LogSumExp::log_mean() const {
    if (n_ == 0) return -kInf;
    return log_sum() - std::log(static_cast<double>(n_));
}

double LogSumExp::log_mean_se() const {
    if (n_ < 2 || sum_ == 0.0) return kInf;
    double n = static_cast<double>(n_);
    double m = sum_ / n;
    double var = (sum_sq_ - sum_ * sum_ / n) / (n - 1.0);
    if (var <= 0.0) return 0.0;
    return std::sqrt(var / n) / m;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs, int ddof) {
    if (xs.size() <= static_cast<std::size_t>(ddof)) return 0.0;
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - ddof);
}

double sd(std::span<const double> xs, int ddof) { return std::sqrt(variance(xs, ddof)); }

double skewness(std::span<const double> xs) {
    if (xs.size() < 3) return 0.0;
    double m = mean(xs);
    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    double n = static_cast<double>(xs.size());
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
    if (sorted.empty()) throw DomainError("quantile: empty sample");
    double h = p * (static_cast<double>(sorted.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> xs, double p) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, p);
}

}  // namespace rtmix::stats
