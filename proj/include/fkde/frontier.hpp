#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fkde/error.hpp"

namespace fkde {

enum class FrontierFamily { constant, affine, cosine, piecewise_linear };

inline std::string_view to_string(FrontierFamily family) {
  switch (family) {
  case FrontierFamily::constant: return "constant";
  case FrontierFamily::affine: return "affine";
  case FrontierFamily::cosine: return "cosine";
  case FrontierFamily::piecewise_linear: return "piecewise-linear";
  }
  return "unknown";
}

/// Lower and upper bound of the frontier over one strip.
struct StripExtrema {
  double min;
  double max;
};

//! Upper boundary f of the support set D = {(x, y): 0 <= x <= 1, 0 <= y <= f(x)}.
//!
//! Each family carries its Hoelder data (alpha, lip_const), its range
//! [min_height, max_height] and the closed-form area of D, so that
//! c = 1 / area and the strip extrema are exact.
//!
//! Parameterisation:
//!   constant          f(x) = level
//!   affine            f(x) = intercept + slope * x
//!   cosine            f(x) = base + amplitude * cos(2 pi x)
//!   piecewise-linear  linear interpolation of values at the knots j/m, j = 0..m
class Frontier {
public:
  static Frontier constant(double level) {
    if (!(level > 0.0) || !std::isfinite(level))
      throw DomainError("constant frontier: level must be finite and > 0");
    return Frontier(FrontierFamily::constant, {level}, 1.0, 0.0, level, level,
                    level);
  }

  static Frontier affine(double intercept, double slope) {
    const double end = intercept + slope;
    if (!std::isfinite(intercept) || !std::isfinite(slope) ||
        !(intercept > 0.0) || !(end > 0.0))
      throw DomainError("affine frontier: f must be finite and > 0 on [0,1]");
    return Frontier(FrontierFamily::affine, {intercept, slope}, 1.0,
                    std::abs(slope), std::min(intercept, end),
                    std::max(intercept, end), intercept + 0.5 * slope);
  }

  static Frontier cosine(double base, double amplitude) {
    if (!std::isfinite(base) || !std::isfinite(amplitude) ||
        !(base - std::abs(amplitude) > 0.0))
      throw DomainError("cosine frontier: need base > |amplitude|");
    const double a = std::abs(amplitude);
    return Frontier(FrontierFamily::cosine, {base, amplitude}, 1.0,
                    2.0 * std::numbers::pi * a, base - a, base + a, base);
  }

  // alpha may be declared below 1: a Lipschitz function on [0,1] is
  // alpha-Hoelder with the same constant for every alpha in (0,1].
  static Frontier piecewise_linear(std::vector<double> values,
                                   double alpha = 1.0) {
    if (values.size() < 2)
      throw DomainError("piecewise-linear frontier: need at least 2 knots");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw DomainError("piecewise-linear frontier: alpha must be in (0,1]");
    double lo = values.front(), hi = values.front();
    double lip = 0.0, area = 0.0;
    const double m = static_cast<double>(values.size() - 1);
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!std::isfinite(values[j]) || !(values[j] > 0.0))
        throw DomainError("piecewise-linear frontier: knot values must be > 0");
      lo = std::min(lo, values[j]);
      hi = std::max(hi, values[j]);
      if (j > 0) {
        lip = std::max(lip, std::abs(values[j] - values[j - 1]) * m);
        area += 0.5 * (values[j] + values[j - 1]) / m;
      }
    }
    return Frontier(FrontierFamily::piecewise_linear, std::move(values), alpha,
                    lip, lo, hi, area);
  }

  FrontierFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  double alpha() const { return alpha_; }
  double lip_const() const { return lip_const_; }
  double min_height() const { return min_height_; }
  double max_height() const { return max_height_; }
  double area() const { return area_; }
  /// c, the intensity of the uniform law on D.
  double inverse_area() const { return 1.0 / area_; }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
      throw DomainError("frontier evaluated outside [0,1]");
    return eval_unchecked(x);
  }

  // Exact for every family: the extrema over the closed strip
  // [(r-1)/k, r/k] are attained at the strip ends or at interior critical
  // points (cosine peaks/troughs, piecewise-linear knots).
  StripExtrema strip_extrema(std::size_t k, std::size_t r) const {
    if (k == 0 || r < 1 || r > k)
      throw DomainError("strip_extrema: need 1 <= r <= k");
    const double kk = static_cast<double>(k);
    const double lo = static_cast<double>(r - 1) / kk;
    const double hi = static_cast<double>(r) / kk;
    StripExtrema e{eval_unchecked(lo), eval_unchecked(lo)};
    auto take = [&e](double v) {
      e.min = std::min(e.min, v);
      e.max = std::max(e.max, v);
    };
    take(eval_unchecked(hi));

    switch (family_) {
    case FrontierFamily::constant:
    case FrontierFamily::affine:
      break;
    case FrontierFamily::cosine: {
      // cos(2 pi x) = +1 at integers, -1 at half-integers.
      const double base = params_[0], amp = params_[1];
      for (int j = 0; j <= 2; ++j) {
        const double c = 0.5 * j;
        if (c >= lo && c <= hi) take(base + amp * (j % 2 == 0 ? 1.0 : -1.0));
      }
      break;
    }
    case FrontierFamily::piecewise_linear: {
      const std::size_t segments = params_.size() - 1;
      const double m = static_cast<double>(segments);
      for (std::size_t j = 0; j <= segments; ++j) {
        const double knot = static_cast<double>(j) / m;
        if (knot < lo || knot > hi) continue;
        take(params_[j]);
        // value of segment j-1 evaluated at its right end
        if (j > 0) take(segment_value(j - 1, 1.0));
      }
      break;
    }
    }
    return e;
  }

private:
  Frontier(FrontierFamily family, std::vector<double> params, double alpha,
           double lip, double lo, double hi, double area)
      : family_(family), params_(std::move(params)), alpha_(alpha),
        lip_const_(lip), min_height_(lo), max_height_(hi), area_(area) {}

  double segment_value(std::size_t j, double t) const {
    return params_[j] + t * (params_[j + 1] - params_[j]);
  }

  double eval_unchecked(double x) const {
    switch (family_) {
    case FrontierFamily::constant:
      return params_[0];
    case FrontierFamily::affine:
      return params_[0] + params_[1] * x;
    case FrontierFamily::cosine:
      return params_[0] + params_[1] * std::cos(2.0 * std::numbers::pi * x);
    case FrontierFamily::piecewise_linear: {
      const std::size_t segments = params_.size() - 1;
      const double s = x * static_cast<double>(segments);
      const std::size_t j =
          std::min(segments - 1, static_cast<std::size_t>(s));
      return segment_value(j, s - static_cast<double>(j));
    }
    }
    return 0.0;
  }

  FrontierFamily family_;
  std::vector<double> params_;
  double alpha_;
  double lip_const_;
  double min_height_;
  double max_height_;
  double area_;
};

inline double frontier_eval(const Frontier& f, double x) { return f(x); }

inline StripExtrema strip_extrema(const Frontier& f, std::size_t k,
                                  std::size_t r) {
  return f.strip_extrema(k, r);
}

} // namespace fkde
