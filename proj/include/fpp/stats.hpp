#pragma once

// Small statistics kit for the Monte Carlo harness: running moments,
// normal-approximation confidence intervals for means, Wilson score
// intervals for proportions, and the one-sided trend comparison used by
// every experiment (pinned at significance level 0.01).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fpp {

// z quantiles used across the toolkit (two-sided 95%/99%, one-sided 99%).
inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr double kZOneSided99 = 2.3263478740408408;

// Welford running mean/variance.
class OnlineStats {
  public:
    void add(double x)
    {
        ++n_;
        double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
    }

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double std_error() const { return n_ > 0 ? stddev() / std::sqrt(double(n_)) : 0.0; }

    // Half-width of the normal-approximation CI for the mean.
    double ci_halfwidth(double z = kZ95) const { return z * std_error(); }

  private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

inline WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                                      double z = kZ95)
{
    if (trials <= 0) throw std::invalid_argument("wilson_interval: need trials > 0");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double n = double(trials);
    const double p = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // Rounding can push the bounds an ulp past the unit interval; the result
    // is a probability, so clamp.
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// One-sided trend comparison between consecutive proportions. "Decreasing"
// is declared only when the one-sided 99% lower bound of the earlier
// proportion clears the one-sided 99% upper bound of the later one;
// symmetric for "increasing".
struct TrendComparison {
    double p_earlier = 0.0;
    double p_later = 0.0;
    bool significantly_decreasing = false;
    bool significantly_increasing = false;
};

inline TrendComparison compare_proportions(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                                           std::int64_t n2, double z = kZOneSided99)
{
    auto w1 = wilson_interval(k1, n1, z);
    auto w2 = wilson_interval(k2, n2, z);
    TrendComparison c;
    c.p_earlier = double(k1) / double(n1);
    c.p_later = double(k2) / double(n2);
    c.significantly_decreasing = w1.lo > w2.hi;
    c.significantly_increasing = w1.hi < w2.lo;
    return c;
}

}  // namespace fpp
