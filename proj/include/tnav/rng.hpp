#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "tnav/common.hpp"

namespace tnav {

// splitmix64 finalizer. Also used as the string/field hash primitive so that
// seed derivation is pinned to this codebase, not to a library's unspecified
// hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash64(std::string_view s) {
  std::uint64_t h = 0x6a09e667f3bcc909ull;
  for (unsigned char c : s) h = mix64(h ^ c);
  return h;
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ v);
}

// Deterministic stream generator (splitmix64). All stochastic components use
// this class; std::random distributions are avoided because their outputs are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe under log().
  double uniform01_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n). Mask-and-reject; deterministic given the
  // stream position.
  std::uint64_t bounded(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = ~0ull;
    std::uint64_t m = n - 1;
    mask >>= __builtin_clzll(m | 1);
    for (;;) {
      std::uint64_t v = next_u64() & mask;
      if (v < n) return v;
    }
  }

  // Standard normal via Box-Muller, caching the second variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01_open_low();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent child stream; used to give each rollout/worker its own
  // stream without sharing state.
  Rng fork(std::uint64_t salt) { return Rng(mix64(next_u64() ^ salt)); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Episode seed derivation: base XOR hash(terrain_id, method, trial). The
// method string must uniquely identify planner+controller+adaptive flag.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view terrain_id,
                                 std::string_view method, std::uint64_t trial) {
  std::uint64_t h = hash64(terrain_id);
  h = hash_combine(h, hash64(method));
  h = hash_combine(h, trial);
  return base_seed ^ h;
}

}  // namespace tnav
