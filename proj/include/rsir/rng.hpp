#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace rsir {

using Rng = std::mt19937_64;

/// Mixes a base seed with an ordered list of stream identifiers. Every
/// (user, trial) task gets its own generator, so results do not depend on
/// scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  return Rng(derive_seed(seed, stream));
}

/// k distinct values drawn uniformly from [0, n) (Floyd's algorithm), in
/// draw order. k is clamped to n.
template <typename RngT>
std::vector<std::uint32_t> sample_distinct(std::size_t n, std::size_t k, RngT& rng) {
  std::vector<std::uint32_t> out;
  if (k >= n) {
    out.reserve(n);
    for (std::size_t v = 0; v < n; ++v) out.push_back(static_cast<std::uint32_t>(v));
    return out;
  }
  std::vector<char> taken(n, 0);
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> dist(0, j);
    std::size_t t = dist(rng);
    if (taken[t]) t = j;
    taken[t] = 1;
    out.push_back(static_cast<std::uint32_t>(t));
  }
  return out;
}

}  // namespace rsir
