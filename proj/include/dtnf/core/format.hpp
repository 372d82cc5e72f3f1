#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace dtnf {

/// Shortest text that reads back to the same double; "nan"/"inf" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace dtnf
