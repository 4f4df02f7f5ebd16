#include "rsir/synth.hpp"

#include <random>

#include "rsir/error.hpp"
#include "rsir/rng.hpp"

namespace rsir {

SynthWorld synth_world(std::size_t n_users, std::size_t n_items, int order, std::uint64_t seed) {
  if (n_items < 10) throw Error(ErrorKind::Config, "synthetic world needs at least 10 items");
  if (order != 1) throw Error(ErrorKind::Config, "only first-order synthetic worlds are supported");

  SynthWorld world;
  world.num_items = n_items;
  Rng structure = make_rng(seed, {0x5717});
  world.successors.resize(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    // Three distinct successors, none equal to the item itself.
    const auto picks = sample_distinct(n_items - 1, 3, structure);
    for (std::size_t s = 0; s < 3; ++s) {
      ItemIndex v = picks[s];
      if (v >= i) ++v;
      world.successors[i][s] = v;
    }
  }

  std::uniform_int_distribution<std::size_t> length(5, 15);
  std::uniform_int_distribution<ItemIndex> any_item(0, static_cast<ItemIndex>(n_items - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t u = 0; u < n_users; ++u) {
    Rng walk = make_rng(seed, {0x3A1C, u});
    const std::string user = "u" + std::to_string(u);
    const std::size_t n = length(walk);
    ItemIndex cur = any_item(walk);
    for (std::size_t t = 0; t < n; ++t) {
      world.log.push_back({user, "i" + std::to_string(cur), static_cast<std::int64_t>(t)});
      double r = unit(walk);
      ItemIndex next = any_item(walk);
      for (std::size_t s = 0; s < 3; ++s) {
        if (r < kSuccessorMass[s]) {
          next = world.successors[cur][s];
          break;
        }
        r -= kSuccessorMass[s];
      }
      cur = next;
    }
  }
  return world;
}

}  // namespace rsir
