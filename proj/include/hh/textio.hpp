#pragma once

#include <cstdio>
#include <string>

namespace hh {

// 17 significant digits: round-trippable doubles with '.' decimal separator.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC-4180 line terminator.
inline constexpr const char* kCrlf = "\r\n";

}  // namespace hh
