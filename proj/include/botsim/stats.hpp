#pragma once

// Small statistics toolbox for replicate aggregation and acceptance checks:
// t-based confidence intervals, two-sample Kolmogorov-Smirnov distance, and
// a one-sided sign test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace botsim {

inline double mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

inline double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

struct Ci {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double half_width = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;

  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
  bool overlaps(const Ci& other) const {
    return std::abs(mean - other.mean) <= half_width + other.half_width;
  }
};

// Student-t interval on the mean: half-width = t_{(1+level)/2, n-1} * s/sqrt(n).
// Half-width is missing for n < 2.
inline Ci confidence_interval(const std::vector<double>& values, double level = 0.95) {
  Ci ci;
  ci.n = values.size();
  ci.mean = mean_of(values);
  if (values.size() < 2) return ci;
  const double s = sample_std(values);
  const boost::math::students_t_distribution<double> dist(
      static_cast<double>(values.size() - 1));
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  ci.half_width = t * s / std::sqrt(static_cast<double>(values.size()));
  return ci;
}

// Two-sample Kolmogorov-Smirnov statistic: sup over x of |F_a(x) - F_b(x)|.
template <typename T>
double ks_statistic(std::vector<T> a, std::vector<T> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const T x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

// Critical value for the two-sample KS test at significance alpha.
inline double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

// One-sided sign test: P(X >= successes) for X ~ Binomial(trials, 1/2).
inline double sign_test_p(std::size_t successes, std::size_t trials) {
  if (successes > trials) throw std::invalid_argument("sign_test_p: successes > trials");
  double p = 0.0;
  for (std::size_t k = successes; k <= trials; ++k) {
    const double log_binom = std::lgamma(static_cast<double>(trials) + 1.0) -
                             std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(static_cast<double>(trials - k) + 1.0);
    p += std::exp(log_binom - static_cast<double>(trials) * std::log(2.0));
  }
  return std::min(p, 1.0);
}

}  // namespace botsim
