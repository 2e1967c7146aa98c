#pragma once

#include <cmath>

#include "fkde/frontier.hpp"
#include "fkde/kernel.hpp"

namespace fkde {

/// Limiting standard deviation of the scaled estimation error:
/// sigma = ||K||_2 / c with c = 1 / area(D).
inline double sigma_theoretical(const Kernel& kernel, const Frontier& frontier) {
  return std::sqrt(kernel.l2_norm_sq()) * frontier.area();
}

} // namespace fkde
