#pragma once

// Deterministic draws on top of mt19937_64. We avoid std::uniform_*
// distributions because their output sequences are implementation-defined;
// these helpers produce the same stream everywhere.

#include <cstdint>
#include <random>

namespace revpref {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Inclusive bounds. Modulo bias is irrelevant at our range sizes.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo,
                                std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace revpref
