#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rsir/backbone.hpp"

namespace rsir {

struct SplitView;

/// First-order transition counts with add-alpha smoothing. Scores are
/// P(v | last context item); an empty context or an unseen last item gives
/// the uniform distribution.
class MarkovModel final : public Model {
 public:
  using Row = std::vector<std::pair<ItemIndex, std::uint64_t>>;

  MarkovModel(std::size_t num_items, double alpha);

  BackboneKind kind() const override { return BackboneKind::Markov; }
  std::size_t num_items() const override { return num_items_; }
  double alpha() const { return alpha_; }

  void add_transition(ItemIndex from, ItemIndex to, std::uint64_t count = 1);
  std::uint64_t count(ItemIndex from, ItemIndex to) const;
  std::uint64_t row_total(ItemIndex from) const { return totals_.at(from); }

  /// Rows sorted by successor index.
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t nonzeros() const;

  double probability(ItemIndex from, ItemIndex to) const;

  using Model::score_context;
  void score_context(std::span<const ItemIndex> context, std::span<double> out) const override;
  std::unique_ptr<Model> clone() const override;

 private:
  std::size_t num_items_;
  double alpha_;
  std::vector<Row> rows_;
  std::vector<std::uint64_t> totals_;
};

/// One count per adjacent pair of every training sequence.
MarkovModel train_markov(const SplitView& view, double alpha);

}  // namespace rsir
