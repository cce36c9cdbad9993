// Small statistics toolbox: compensated summation, mergeable mean/variance
// accumulators, Wilson intervals, a two-sample Kolmogorov-Smirnov test, and
// the chi-square uniformity statistic.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qsg {

// Neumaier compensated sum; add order still matters, so reductions combine
// per-chunk partials in a fixed order.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming count/mean/M2 with an exact merge, so chunked parallel
// reductions reproduce the single-threaded result bit-for-bit when merged
// in chunk order.
class MomentAccumulator {
 public:
  void add(double value);
  void merge(const MomentAccumulator& other);

  long count() const { return count_; }
  double mean() const { return mean_; }
  // Unbiased sample variance (0 for fewer than 2 samples).
  double variance() const;
  // Standard error of the mean.
  double std_error() const;

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(long successes, long trials, double z = 1.959963984540054);

// Two-sample Kolmogorov-Smirnov: returns {D, p_value} using the asymptotic
// Kolmogorov distribution with the small-sample size correction. Ties make
// the test conservative.
struct KsResult {
  double statistic;
  double p_value;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Chi-square statistic of observed counts against a uniform expectation.
double chi_square_uniform(std::span<const long> counts);

// Spearman rank correlation (average-rank ties).
double rank_correlation(std::span<const double> x, std::span<const double> y);

// Ordinary least squares y = a + b x; returns {slope, intercept, r_squared}.
struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace qsg
