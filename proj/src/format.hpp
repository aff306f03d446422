#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace lzeros::detail {

// Shortest round-trippable text for a double; stable across runs.
inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace lzeros::detail
