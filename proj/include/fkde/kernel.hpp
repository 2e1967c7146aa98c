#pragma once

#include <cmath>
#include <string_view>

#include "fkde/error.hpp"

namespace fkde {

enum class KernelFamily { epanechnikov, biweight, triangular };

inline std::string_view to_string(KernelFamily family) {
  switch (family) {
  case KernelFamily::epanechnikov: return "epanechnikov";
  case KernelFamily::biweight: return "biweight";
  case KernelFamily::triangular: return "triangular";
  }
  return "unknown";
}

//! Compactly supported smoothing density on [-1, 1].
//!
//! All three families are bounded, have a bounded first derivative and are
//! piecewise C^2.
class Kernel {
public:
  constexpr explicit Kernel(KernelFamily family = KernelFamily::epanechnikov)
      : family_(family) {}

  constexpr KernelFamily family() const { return family_; }
  constexpr double support_radius() const { return 1.0; }

  /// Closed-form integral of K^2.
  constexpr double l2_norm_sq() const {
    switch (family_) {
    case KernelFamily::epanechnikov: return 3.0 / 5.0;
    case KernelFamily::biweight: return 5.0 / 7.0;
    case KernelFamily::triangular: return 2.0 / 3.0;
    }
    return 0.0;
  }

  /// sup |K'| over the support (one-sided at kinks).
  double derivative_bound() const {
    switch (family_) {
    case KernelFamily::epanechnikov: return 1.5;
    case KernelFamily::biweight: return 2.5 / std::sqrt(3.0);
    case KernelFamily::triangular: return 1.0;
    }
    return 0.0;
  }

  constexpr double operator()(double t) const {
    const double a = t < 0.0 ? -t : t;
    if (!(a <= 1.0)) return 0.0;
    switch (family_) {
    case KernelFamily::epanechnikov:
      return 0.75 * (1.0 - t * t);
    case KernelFamily::biweight: {
      const double u = 1.0 - t * t;
      return 0.9375 * u * u;
    }
    case KernelFamily::triangular:
      return 1.0 - a;
    }
    return 0.0;
  }

  /// K_h(t) = K(t / h) / h.
  double scaled(double h, double t) const {
    if (!(h > 0.0)) throw DomainError("kernel bandwidth must be > 0");
    return (*this)(t / h) / h;
  }

  friend constexpr bool operator==(Kernel, Kernel) = default;

private:
  KernelFamily family_;
};

inline double kernel_eval(const Kernel& kernel, double t) { return kernel(t); }

inline double kernel_scaled_eval(const Kernel& kernel, double h, double t) {
  return kernel.scaled(h, t);
}

} // namespace fkde
