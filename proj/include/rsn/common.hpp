#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rsn {

// Thrown when a configuration document (or a value derived from one) is
// structurally or semantically invalid. CLI maps this to exit code 3.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on numerical failure: non-convergence, step-size underflow,
// norm loss, internal cross-check mismatch. CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a quantity is undefined at a degenerate point
// (e.g. a relaxation timescale at zero curvature).
class degenerate_error : public numeric_error {
 public:
  explicit degenerate_error(const std::string& what) : numeric_error(what) {}
};

// 17 significant digits: lossless decimal round trip for IEEE doubles.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

}  // namespace rsn
