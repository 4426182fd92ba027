#pragma once

#include <cstdint>

namespace irrhodge {

// Deterministic 64-bit PRNG (splitmix64).  Used instead of <random>
// distributions so that seeded runs produce identical streams on every
// platform and standard library.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n); n >= 1.  Modulo bias is irrelevant at desk scale.
  uint64_t below(uint64_t n) { return next() % n; }

  // uniform in [lo, hi] inclusive
  long range(long lo, long hi) { return lo + (long)below((uint64_t)(hi - lo + 1)); }
};

}  // namespace irrhodge
