#include <algorithm>
#include <numeric>

#include "rsir/error.hpp"
#include "rsir/generator.hpp"

namespace rsir {

namespace {

std::vector<GenerationSource> original_sources(const Corpus& corpus, const SplitView* holdout) {
  std::vector<GenerationSource> out;
  std::size_t original = 0;
  for (const auto& seq : corpus.sequences()) {
    if (seq.origin.generated || seq.items.size() < 2) continue;
    GenerationSource src{seq.user, seq.items};
    if (holdout != nullptr) src.items = holdout->users.at(original).train;
    ++original;
    out.push_back(std::move(src));
  }
  return out;
}

template <typename Augment>
Corpus augment_copies(const Corpus& corpus, std::uint64_t seed, const SplitView* holdout, std::size_t max_added,
                      std::uint64_t salt, Augment&& augment) {
  const auto sources = original_sources(corpus, holdout);
  std::vector<std::size_t> order(sources.size());
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng = make_rng(seed, {salt});
  std::shuffle(order.begin(), order.end(), order_rng);

  const int k = corpus.iteration_tag() + 1;
  Corpus out = corpus;
  out.set_iteration_tag(k);
  std::size_t added = 0;
  // Passes repeat until max_added is reached or a pass adds nothing new.
  for (std::uint64_t pass = 0;; ++pass) {
    const std::size_t before = added;
    for (std::size_t idx : order) {
      if (max_added > 0 && added >= max_added) break;
      const auto& src = sources[idx];
      Rng rng = make_rng(seed, {salt, src.user, idx, pass});
      ItemList items = augment(src.items, rng);
      const std::size_t len = items.size();
      if (out.add({src.user, std::move(items), Origin::from_iteration(k)})) added += len;
    }
    if (max_added == 0 || added >= max_added || added == before) break;
  }
  return out;
}

}  // namespace

Corpus baseline_insert(const Corpus& corpus, double ratio, std::uint64_t seed, const SplitView* holdout,
                       std::size_t max_added) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error(ErrorKind::Config, "insertion ratio must lie in (0, 1]");
  const std::size_t n_items = corpus.num_items();
  return augment_copies(corpus, seed, holdout, max_added, 0x1A5E, [&](const ItemList& src, Rng& rng) {
    ItemList items = src;
    std::uniform_int_distribution<ItemIndex> pick_item(0, static_cast<ItemIndex>(n_items - 1));
    const std::size_t count = ceil_count(ratio, src.size());
    for (std::size_t c = 0; c < count; ++c) {
      std::uniform_int_distribution<std::size_t> pick_pos(0, items.size());
      const std::size_t pos = pick_pos(rng);
      items.insert(items.begin() + static_cast<std::ptrdiff_t>(pos), pick_item(rng));
    }
    return items;
  });
}

Corpus baseline_reorder(const Corpus& corpus, std::size_t window, std::uint64_t seed, const SplitView* holdout,
                        std::size_t max_added) {
  if (window < 2) throw Error(ErrorKind::Config, "reorder window must be >= 2");
  return augment_copies(corpus, seed, holdout, max_added, 0x5E0D, [&](const ItemList& src, Rng& rng) {
    ItemList items = src;
    const std::size_t w = std::min(window, items.size());
    std::uniform_int_distribution<std::size_t> pick_start(0, items.size() - w);
    const auto start = static_cast<std::ptrdiff_t>(pick_start(rng));
    std::shuffle(items.begin() + start, items.begin() + start + static_cast<std::ptrdiff_t>(w), rng);
    return items;
  });
}

}  // namespace rsir
