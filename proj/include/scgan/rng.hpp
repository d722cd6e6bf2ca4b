#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scgan/common.hpp"

namespace scgan {

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fully specified by the standard; all value transforms (uniform,
// normal, shuffle) are implemented here rather than via std:: distributions,
// which are implementation-defined. This makes streams reproducible across
// runs and serializable into checkpoints.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_token_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of entropy.
  real uniform01() {
    return static_cast<real>(engine_() >> 11) * 0x1.0p-53;
  }

  real uniform(real lo, real hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Rejection-free multiply-shift would bias for
  // huge n; plain rejection keeps it exact.
  std::uint64_t uniform_index(std::uint64_t n) {
    check(n > 0, "uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller. Draws two uniforms per value and discards
  // the sine branch, so there is no hidden pair cache to serialize.
  real normal() {
    real u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const real u2 = uniform01();
    const real two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  real normal(real mean, real stddev) { return mean + stddev * normal(); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent child stream, e.g. one per patch, so work can be
  // fanned out without coupling the draw order to iteration order.
  std::uint64_t child_seed(std::uint64_t tag) const {
    return splitmix(seed_token_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
  }

  Rng child(std::uint64_t tag) const { return Rng(child_seed(tag)); }

  // The engine state round-trips through text losslessly (integer tokens).
  std::string serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void deserialize(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    check(!is.fail(), "Rng: malformed serialized state");
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  std::uint64_t seed_token_ = 0;
};

}  // namespace scgan
