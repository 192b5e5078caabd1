#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "graphsos/errors.hpp"

namespace graphsos {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

/// Like format_double but keeps a decimal point on integral values ("1.0").
inline std::string format_decimal(double value) {
  std::string s = format_double(value);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw FormatError("invalid number '" + std::string(text) + "'");
  return value;
}

}  // namespace graphsos
