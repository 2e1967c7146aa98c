#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fkde/error.hpp"
#include "fkde/kernel.hpp"
#include "fkde/sim.hpp"

namespace fkde {

struct EstimatorParams {
  std::size_t n = 0; // nominal sample size
  std::size_t k = 0; // number of strips
  double h = 0.0;    // bandwidth
  Kernel kernel{};

  void validate() const {
    if (k == 0 || k >= n)
      throw ParameterError("estimator: need 0 < k < n (k=" + std::to_string(k) +
                           ", n=" + std::to_string(n) + ")");
    if (!(h > 0.0) || !std::isfinite(h))
      throw ParameterError("estimator: bandwidth h must be finite and > 0");
  }
};

/// Centre of strip r (1-based) among k equal strips of [0,1].
inline double strip_center(std::size_t k, std::size_t r) {
  return (static_cast<double>(r) - 0.5) / static_cast<double>(k);
}

/// 0-based index of the strip [(r-1)/k, r/k) containing x; x = 1 goes to the
/// last strip.
inline std::size_t strip_index(double x, std::size_t k) {
  const double s = x * static_cast<double>(k);
  if (s >= static_cast<double>(k)) return k - 1;
  return static_cast<std::size_t>(s);
}

//! Per-strip maxima of the ordinates. u[i] is the maximum over strip i + 1
//! (0-based storage); a strip with no point has u = 0.
struct StripMaxima {
  std::vector<double> u;
  std::vector<std::size_t> empty_strips; // 0-based, ascending
};

inline StripMaxima strip_maxima(std::span<const Point> points, std::size_t k) {
  if (k == 0) throw ParameterError("strip_maxima: k must be >= 1");
  StripMaxima out;
  out.u.assign(k, 0.0);
  std::vector<bool> hit(k, false);
  for (const Point& p : points) {
    if (!(p.x >= 0.0 && p.x <= 1.0))
      throw DomainError("strip_maxima: point abscissa outside [0,1]");
    const std::size_t i = strip_index(p.x, k);
    out.u[i] = std::max(out.u[i], p.y);
    hit[i] = true;
  }
  for (std::size_t i = 0; i < k; ++i)
    if (!hit[i]) out.empty_strips.push_back(i);
  return out;
}

inline StripMaxima strip_maxima(const SampleView& sample, std::size_t k) {
  return strip_maxima(sample.points, k);
}

namespace detail {

// 1-based strip range [first, last] whose centres may lie within the
// kernel support around x; empty when first > last.
struct StripWindow {
  std::size_t first;
  std::size_t last;
};

inline StripWindow kernel_window(const EstimatorParams& p, double x) {
  const double kk = static_cast<double>(p.k);
  const double reach = p.kernel.support_radius() * p.h;
  const double lo = std::floor((x - reach) * kk + 0.5) - 1.0;
  const double hi = std::ceil((x + reach) * kk + 0.5) + 1.0;
  if (!(hi >= 1.0) || !(lo <= kk)) return {1, 0};
  return {static_cast<std::size_t>(std::max(1.0, lo)),
          static_cast<std::size_t>(std::min(kk, hi))};
}

} // namespace detail

/// (1/k) sum_r K_h(x - x_r), the Riemann sum of the scaled kernel.
inline double kernel_riemann_sum(const EstimatorParams& p, double x) {
  p.validate();
  const auto w = detail::kernel_window(p, x);
  double acc = 0.0;
  for (std::size_t r = w.first; r <= w.last; ++r)
    acc += p.kernel.scaled(p.h, x - strip_center(p.k, r));
  return acc / static_cast<double>(p.k);
}

/// Coefficients beta_r(x) writing the estimator as sum_r beta_r(x) u_r:
/// beta_r = K_h(x - x_r) / k + sum_s K_h(x - x_s) / (k (n - k)).
inline std::vector<double> weights(const EstimatorParams& p, double x) {
  p.validate();
  const double kk = static_cast<double>(p.k);
  const double nk = static_cast<double>(p.n - p.k);
  std::vector<double> kern(p.k, 0.0);
  const auto w = detail::kernel_window(p, x);
  double kernel_sum = 0.0;
  for (std::size_t r = w.first; r <= w.last; ++r) {
    kern[r - 1] = p.kernel.scaled(p.h, x - strip_center(p.k, r));
    kernel_sum += kern[r - 1];
  }
  const double shared = kernel_sum / (kk * nk);
  std::vector<double> beta(p.k);
  for (std::size_t i = 0; i < p.k; ++i) beta[i] = kern[i] / kk + shared;
  return beta;
}

inline double weight_sum(const EstimatorParams& p, double x) {
  const auto beta = weights(p, x);
  return std::accumulate(beta.begin(), beta.end(), 0.0);
}

/// Kernel frontier estimate at x from strip maxima u:
/// (1/k) sum_r K_h(x - x_r) (u_r + sum_s u_s / (n - k)).
///
/// Every step is monotone in each u_r, so pointwise larger maxima give a
/// larger or equal result in floating point as well.
inline double estimate(const EstimatorParams& p, std::span<const double> u,
                       double x) {
  p.validate();
  if (u.size() != p.k)
    throw ParameterError("estimate: strip maxima length " +
                         std::to_string(u.size()) + " != k " +
                         std::to_string(p.k));
  double total = 0.0;
  for (double v : u) total += v;
  const double correction = total / static_cast<double>(p.n - p.k);
  const auto w = detail::kernel_window(p, x);
  double acc = 0.0;
  for (std::size_t r = w.first; r <= w.last; ++r)
    acc += p.kernel.scaled(p.h, x - strip_center(p.k, r)) * (u[r - 1] + correction);
  return acc / static_cast<double>(p.k);
}

inline double estimate(const EstimatorParams& p, const StripMaxima& m,
                       double x) {
  return estimate(p, std::span<const double>(m.u), x);
}

/// Direct recomputation of the estimate from raw points: a double loop over
/// strips and points with its own membership test and a full kernel sum.
/// Test reference only; O(k * points).
inline double estimate_oracle(std::span<const Point> points,
                              const EstimatorParams& p, double x) {
  p.validate();
  const double kk = static_cast<double>(p.k);
  std::vector<double> maxima(p.k);
  for (std::size_t r = 1; r <= p.k; ++r) {
    const double left = static_cast<double>(r - 1);
    const double right = static_cast<double>(r);
    double best = 0.0;
    for (const Point& z : points) {
      const double s = z.x * kk;
      const bool inside = (s >= left && s < right) || (r == p.k && s >= right);
      best = inside && z.y > best ? z.y : best;
    }
    maxima[r - 1] = best;
  }
  double total = 0.0;
  for (double v : maxima) total += v;
  const double nk = static_cast<double>(p.n) - kk;
  double acc = 0.0;
  for (std::size_t r = 1; r <= p.k; ++r) {
    const double xr = (static_cast<double>(r) - 0.5) / kk;
    acc += p.kernel((x - xr) / p.h) / p.h * (maxima[r - 1] + total / nk);
  }
  return acc / kk;
}

inline double estimate_oracle(const SampleView& sample,
                              const EstimatorParams& p, double x) {
  return estimate_oracle(sample.points, p, x);
}

//! Power-law rate plan k_n = n^a, h_n = n^-b and the four rate conditions of
//! the central limit theorem, rewritten as inequalities on the exponents.
struct ExponentPlan {
  double alpha = 1.0;
  double a = 0.0;
  double b = 0.0;
  bool hk_diverges = false;        // h_n k_n -> inf:                  a > b
  bool holder_bias_vanishes = false; // n = o(k^1/2 h^(-1/2-alpha)):   a/2 + b(1/2+alpha) > 1
  bool discretisation_vanishes = false; // n = o(k^5/2 h^3/2):          5a/2 - 3b/2 > 1
  bool strips_sparse = false;      // k_n = o(n / ln n):                a < 1
  bool valid = false;

  std::size_t k_for(std::size_t n) const {
    const double k = std::round(std::pow(static_cast<double>(n), a));
    return static_cast<std::size_t>(
        std::clamp(k, 1.0, std::max(1.0, static_cast<double>(n) - 1.0)));
  }
  double h_for(std::size_t n) const {
    return std::pow(static_cast<double>(n), -b);
  }
  EstimatorParams params_for(std::size_t n, Kernel kernel) const {
    return {n, k_for(n), h_for(n), kernel};
  }
};

inline ExponentPlan plan_sequences(double alpha, double a, double b) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("plan_sequences: alpha must be in (0,1]");
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("plan_sequences: exponents a, b must be finite and > 0");
  ExponentPlan plan{alpha, a, b};
  plan.hk_diverges = a > b;
  plan.holder_bias_vanishes = a / 2.0 + b * (0.5 + alpha) > 1.0;
  plan.discretisation_vanishes = 2.5 * a - 1.5 * b > 1.0;
  plan.strips_sparse = a < 1.0;
  plan.valid = plan.hk_diverges && plan.holder_bias_vanishes &&
               plan.discretisation_vanishes && plan.strips_sparse;
  return plan;
}

} // namespace fkde
