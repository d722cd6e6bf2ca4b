#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scgan {

// All numeric work runs in double precision. Desk-scale networks are small
// enough that the cost is dominated by GEMM throughput, and double keeps the
// gradient checks and determinism contracts free of rounding headaches.
using real = double;

// Error categories that callers (in particular the CLI) need to tell apart.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Config documents that fail validation. Carries the full violation list.
struct ConfigError : Error {
  std::vector<std::string> violations;
  explicit ConfigError(std::vector<std::string> v)
      : ConfigError("invalid configuration", std::move(v)) {}
  ConfigError(const std::string& context, std::vector<std::string> v)
      : Error(join(context, v)), violations(std::move(v)) {}

 private:
  static std::string join(const std::string& context,
                          const std::vector<std::string>& v) {
    std::string s = context + ":";
    for (const auto& line : v) s += "\n  - " + line;
    return s;
  }
};

struct CheckpointError : Error {
  explicit CheckpointError(const std::string& msg) : Error(msg) {}
};

inline real clamp(real x, real lo, real hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace scgan
