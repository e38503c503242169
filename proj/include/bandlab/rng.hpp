#pragma once

#include <cstdint>

namespace bandlab {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so sampled values do not depend on traversal order or thread
// count.  Two splitmix64 finalizer rounds give full avalanche.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t z = mix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
  z = mix64(z ^ stream);
  return mix64(z ^ counter);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace bandlab
