#ifndef A2DMM_FORMAT_HPP_
#define A2DMM_FORMAT_HPP_

#include <charconv>
#include <cmath>
#include <string>

namespace a2dmm {

//! Shortest decimal text that parses back to the same double; "inf", "-inf", "nan" otherwise.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace a2dmm

#endif  // A2DMM_FORMAT_HPP_
