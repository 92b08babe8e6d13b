#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace spanforge {

// std::mt19937_64 output is fully specified by the standard, but the standard
// distributions are not; these helpers keep seeded results identical across
// standard libraries.
using Engine = std::mt19937_64;

// Uniform integer in [0, n) by rejection sampling. n > 0.
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  const std::uint64_t limit = Engine::max() - (Engine::max() % n + 1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

// First k entries of a Fisher-Yates shuffle of [0, n): k distinct indices in
// selection order.
inline std::vector<std::size_t> sample_without_replacement(Engine& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace spanforge
