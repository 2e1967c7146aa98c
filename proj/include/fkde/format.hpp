#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace fkde {

/// Round-trip safe decimal with 17 significant digits.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace fkde
