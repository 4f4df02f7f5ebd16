#include "rsir/markov.hpp"

#include <algorithm>

#include "rsir/corpus.hpp"
#include "rsir/error.hpp"

namespace rsir {

MarkovModel::MarkovModel(std::size_t num_items, double alpha)
    : num_items_(num_items), alpha_(alpha), rows_(num_items), totals_(num_items, 0) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::Config, "Markov smoothing alpha must be > 0");
}

void MarkovModel::add_transition(ItemIndex from, ItemIndex to, std::uint64_t count) {
  if (from >= num_items_ || to >= num_items_) throw Error(ErrorKind::Contract, "transition item out of range");
  Row& row = rows_[from];
  auto it = std::lower_bound(row.begin(), row.end(), to,
                             [](const auto& entry, ItemIndex key) { return entry.first < key; });
  if (it != row.end() && it->first == to) {
    it->second += count;
  } else {
    row.insert(it, {to, count});
  }
  totals_[from] += count;
}

std::uint64_t MarkovModel::count(ItemIndex from, ItemIndex to) const {
  const Row& row = rows_.at(from);
  auto it = std::lower_bound(row.begin(), row.end(), to,
                             [](const auto& entry, ItemIndex key) { return entry.first < key; });
  return (it != row.end() && it->first == to) ? it->second : 0;
}

std::size_t MarkovModel::nonzeros() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.size();
  return n;
}

double MarkovModel::probability(ItemIndex from, ItemIndex to) const {
  const double denom = static_cast<double>(totals_.at(from)) + static_cast<double>(num_items_) * alpha_;
  return (static_cast<double>(count(from, to)) + alpha_) / denom;
}

void MarkovModel::score_context(std::span<const ItemIndex> context, std::span<double> out) const {
  if (out.size() != num_items_) throw Error(ErrorKind::Contract, "score buffer size mismatch");
  if (context.empty()) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(num_items_));
    return;
  }
  const ItemIndex last = context.back();
  if (last >= num_items_) throw Error(ErrorKind::Contract, "context item out of range");
  const double denom = static_cast<double>(totals_[last]) + static_cast<double>(num_items_) * alpha_;
  std::fill(out.begin(), out.end(), alpha_ / denom);
  for (const auto& [to, c] : rows_[last]) out[to] = (static_cast<double>(c) + alpha_) / denom;
}

std::unique_ptr<Model> MarkovModel::clone() const { return std::make_unique<MarkovModel>(*this); }

MarkovModel train_markov(const SplitView& view, double alpha) {
  MarkovModel model(view.num_items, alpha);
  for (const ItemList* seq : view.training_sequences()) {
    for (std::size_t t = 1; t < seq->size(); ++t) model.add_transition((*seq)[t - 1], (*seq)[t]);
  }
  return model;
}

}  // namespace rsir
