// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "abps/error.hpp"

namespace abps {

/// One splitmix64 mixing step.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives a stream seed from a root seed plus any number of integer parts.
/// Distinct part tuples give statistically independent streams, which is how
/// actions, batch sampling, bandit draws, evaluation episodes etc. stay
/// decoupled from one another within a run.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t root, Parts... parts) {
  std::uint64_t s = splitmix64(root);
  ((s = splitmix64(s ^ static_cast<std::uint64_t>(parts))), ...);
  return s;
}

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact per
/// the standard); value mappings are explicit here instead of going through
/// std distributions, whose output is implementation-defined.
class RngStream {
 public:
  RngStream() : engine_(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Rejection sampling, unbiased.
  std::uint64_t uniform_int(std::uint64_t bound) {
    require(bound > 0, "uniform_int: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform in [lo, hi).
  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (cosine branch, no cached partner so the
  /// stream state is exactly the engine state).
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Engine state as text (standard-specified format), for checkpoints.
  std::string state_string() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    require(!is.fail(), "RngStream: malformed engine state");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace abps
