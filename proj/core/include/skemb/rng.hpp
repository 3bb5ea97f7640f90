#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace skemb::rng {

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, bound); bound must be nonzero.
// Lemire's multiply-and-reject reduction.
inline std::uint64_t uniform_below(Engine& g, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(g()) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    std::uint64_t threshold = (0ULL - bound) % bound;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(g()) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline bool bernoulli(Engine& g, double p) { return uniform01(g) < p; }

// Box-Muller; two uniforms per draw, no cached second value.
inline double normal(Engine& g, double mean, double stddev) {
  double u1 = 1.0 - uniform01(g);  // (0, 1]
  double u2 = uniform01(g);
  double z = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

// Number of consecutive failures before the next Bernoulli(p) success:
// floor(log(1-u) / log(1-p)). Saturates to uint64 max for vanishing p/huge
// skips, which callers treat as "past the end".
inline std::uint64_t geometric_skip(Engine& g, double p) {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  double u = uniform01(g);
  double skip = std::floor(std::log1p(-u) / std::log1p(-p));
  if (!(skip < 9.0e18)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(skip);
}

template <typename T>
void shuffle(Engine& g, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(g, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace skemb::rng
