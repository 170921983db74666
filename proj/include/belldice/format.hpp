#pragma once

#include <cstdio>
#include <string>

namespace belldice {

// 17 significant digits round-trip any finite double exactly.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

}  // namespace belldice
