#ifndef SCANNEAL_FORMAT_HPP
#define SCANNEAL_FORMAT_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "scanneal/errors.hpp"

namespace scanneal {

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw InvalidInputError("parse_double: cannot parse '" + std::string(text) +
                            "'");
  return v;
}

}  // namespace scanneal

#endif
