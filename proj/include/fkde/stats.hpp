#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "fkde/error.hpp"

namespace fkde {

/// Standard normal CDF.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Kolmogorov-Smirnov distance sup_x |F_N(x) - F(x)| between the empirical
/// distribution of `samples` and a continuous CDF.
template <class Cdf>
double ks_distance(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw ParameterError("ks_distance: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = std::abs(static_cast<double>(i + 1) / n - f);
    const double below = std::abs(static_cast<double>(i) / n - f);
    d = std::max({d, above, below});
  }
  return std::min(d, 1.0);
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) throw ParameterError("mean of empty sequence");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator); undefined below 2 values.
inline std::optional<double> sample_sd(std::span<const double> v) {
  if (v.size() < 2) return std::nullopt;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace fkde
