#pragma once

#include <charconv>
#include <string>

namespace spectran::numkit {

/// Shortest decimal representation that round-trips the double exactly.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace spectran::numkit
