#pragma once

#include "rsir/rng.hpp"

namespace rsir {

template <typename RngT>
ItemList sample_negatives(std::size_t num_items, ItemIndex target, std::size_t count, RngT& rng) {
  if (num_items <= 1) return {};
  ItemList out = sample_distinct(num_items - 1, count, rng);
  for (auto& v : out) {
    if (v >= target) ++v;
  }
  return out;
}

}  // namespace rsir
