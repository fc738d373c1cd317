#pragma once

#include <cstdio>
#include <string>

namespace expsum {

// Fixed 17 significant digits, so text output round-trips and is reproducible.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace expsum
