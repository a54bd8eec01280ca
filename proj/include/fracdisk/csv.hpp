#pragma once

#include <cstdio>
#include <string>

namespace fracdisk::csv {

// Shortest round-trip-safe rendering used by every CSV writer: 17 significant digits.
inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace fracdisk::csv
