#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fslhd {

/// SplitMix64 mixing step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Engine for an independent substream of `seed`. Distinct stream ids give
/// decorrelated engines, so per-column generation is reproducible no matter
/// how the columns are scheduled.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// Unbiased uniform draw from {0, 1, ..., n-1}.
///
/// Hand-rolled (rejection sampling) instead of std::uniform_int_distribution
/// so that output streams do not depend on the standard library
/// implementation.
inline int uniform_index(std::mt19937_64& rng, int n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % bound);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// In-place Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void fisher_yates(std::vector<T>& values, std::mt19937_64& rng) {
  for (int i = static_cast<int>(values.size()) - 1; i > 0; --i) {
    const int j = uniform_index(rng, i + 1);
    std::swap(values[static_cast<std::size_t>(i)], values[static_cast<std::size_t>(j)]);
  }
}

}  // namespace fslhd
