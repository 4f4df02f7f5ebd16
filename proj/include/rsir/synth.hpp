#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rsir/corpus.hpp"

namespace rsir {

/// A random first-order Markov "world" with known ground truth. Every item
/// has three preferred successors carrying 0.8 of the transition mass
/// (0.4, 0.25, 0.15); the remaining 0.2 is spread uniformly over all items.
struct SynthWorld {
  std::size_t num_items = 0;
  std::vector<std::array<ItemIndex, 3>> successors;  ///< strongest first
  std::vector<Interaction> log;                      ///< "u<k>" / "i<k>" ids
};

inline constexpr std::array<double, 3> kSuccessorMass = {0.4, 0.25, 0.15};

/// Users walk the chain for 5 to 15 steps from a uniform start item.
/// Deterministic per seed. Only order 1 is supported.
SynthWorld synth_world(std::size_t n_users, std::size_t n_items, int order, std::uint64_t seed);

}  // namespace rsir
