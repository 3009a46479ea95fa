// Seeded sampling helpers. std::uniform_int_distribution and friends are
// implementation-defined; these are not, so generated datasets are stable
// across standard libraries.
#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace spanproto {

using Rng = std::mt19937_64;

// Uniform integer in [0, n).
inline int rng_index(Rng& rng, int n) {
  assert(n > 0);
  // Rejection sampling to avoid modulo bias.
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

// Uniform double in [0, 1).
inline double rng_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool rng_bernoulli(Rng& rng, double p) { return rng_uniform(rng) < p; }

// Standard normal via Box-Muller.
inline double rng_normal(Rng& rng) {
  double u1 = rng_uniform(rng);
  while (u1 <= 0.0) u1 = rng_uniform(rng);
  const double u2 = rng_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void rng_shuffle(Rng& rng, std::vector<T>& v) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    const int j = rng_index(rng, i + 1);
    std::swap(v[i], v[static_cast<size_t>(j)]);
  }
}

// k distinct indices from [0, n), in draw order.
inline std::vector<int> rng_sample_distinct(Rng& rng, int n, int k) {
  assert(k <= n);
  std::vector<int> pool(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
  std::vector<int> out;
  out.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int j = rng_index(rng, n - i);
    out.push_back(pool[static_cast<size_t>(j)]);
    std::swap(pool[static_cast<size_t>(j)], pool[static_cast<size_t>(n - 1 - i)]);
  }
  return out;
}

}  // namespace spanproto
