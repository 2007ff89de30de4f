#pragma once

#include <cstdio>
#include <string>

namespace ngdlab {

/// Shortest round-trippable decimal form used by every CSV writer:
/// 17 significant digits, %g style.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace ngdlab
