#pragma once

#include <cstdio>
#include <string>

namespace copred {

// 17 significant digits: enough for double round trips, '.' decimal always.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace copred
