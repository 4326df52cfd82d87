#pragma once

#include <cstdint>

namespace rta {

// SplitMix64 generator. Used everywhere randomness is needed so that runs are
// bit-reproducible across compilers (std::uniform_real_distribution is not).
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
};

// Independent stream seed for episode/trial `index` under a master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  SplitMix64 mix(master ^ (0xA0761D6478BD642Full * (index + 1)));
  mix.next();
  return mix.next();
}

}  // namespace rta
