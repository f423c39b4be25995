#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "qrpl/bytes.hpp"

namespace qrpl {

// Deterministic random stream. All sampling goes through explicit
// implementations (not std:: distributions) so that a given seed produces the
// same sequence on every platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(splitmix(seed)) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive, unbiased.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    uint64_t range = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    if (range == 0) return static_cast<int64_t>(next_u64());  // full 64-bit range
    uint64_t bound = (0 - range) % range;                     // 2^64 mod range
    uint64_t v;
    do {
      v = next_u64();
    } while (v < bound);
    return static_cast<int64_t>(static_cast<uint64_t>(lo) + v % range);
  }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal(double mean, double stddev) {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
  }

  bool bernoulli(double p) { return uniform() < p; }

  Bytes bytes(size_t n) {
    Bytes out(n);
    size_t i = 0;
    while (i < n) {
      uint64_t v = next_u64();
      for (int k = 0; k < 8 && i < n; ++k, ++i) {
        out[i] = static_cast<uint8_t>(v >> (8 * k));
      }
    }
    return out;
  }

  // Independent child stream; forks with distinct labels never overlap in
  // practice (distinct splitmix seeds).
  Rng fork(uint64_t label) const {
    return Rng(splitmix(seed_ ^ (0x9e3779b97f4a7c15ull * (label + 1))));
  }

  uint64_t seed() const { return seed_; }

  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace qrpl
