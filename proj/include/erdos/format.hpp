#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace erdos {

/// Locale-independent shortest round-trip decimal; "NA" for non-finite.
inline std::string fmt_double(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace erdos
