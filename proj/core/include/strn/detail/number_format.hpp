#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace strn::detail {

// Shortest decimal form that round-trips to the same double, so serialized
// numbers are bit-exact on reparse and stable across runs.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;  // 32 bytes always suffice for the shortest double form
  return std::string(buf, p);
}

}  // namespace strn::detail
