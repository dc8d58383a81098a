#pragma once

#include <cstdint>
#include <random>

namespace qlwe {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream derivation: the seed for (master, i, j, k) depends only
// on those values, never on how many draws other streams have made.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i,
                                    std::uint64_t j = 0, std::uint64_t k = 0) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (i + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (j + 0x8cb92ba72f3d8dd7ULL));
  h = splitmix64(h ^ (k + 0xd1b54a32d192ed03ULL));
  return h;
}

// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

inline double uniform_unit(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace qlwe
