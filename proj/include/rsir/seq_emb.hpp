#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsir/backbone.hpp"

namespace rsir {

struct SplitView;

/// Recency-decay embedding model. The context vector is a decay-weighted
/// average of input embeddings (most recent item weight 1, each step back
/// multiplied by gamma); items are scored by inner product with their output
/// embeddings.
class SeqEmbModel final : public Model {
 public:
  SeqEmbModel(std::size_t num_items, std::size_t dim, double gamma);

  /// Both tables drawn uniformly from [-0.5/dim, 0.5/dim].
  static SeqEmbModel initialized(std::size_t num_items, std::size_t dim, double gamma,
                                 std::uint64_t seed);

  BackboneKind kind() const override { return BackboneKind::SeqEmb; }
  std::size_t num_items() const override { return num_items_; }
  std::size_t dim() const { return dim_; }
  double gamma() const { return gamma_; }

  std::span<const double> input_row(ItemIndex item) const;
  std::span<double> input_row(ItemIndex item);
  std::span<const double> output_row(ItemIndex item) const;
  std::span<double> output_row(ItemIndex item);

  /// Row-major num_items x dim tables.
  const std::vector<double>& input_embeddings() const { return input_; }
  const std::vector<double>& output_embeddings() const { return output_; }
  std::vector<double>& input_embeddings() { return input_; }
  std::vector<double>& output_embeddings() { return output_; }

  /// Throws Error(Contract) on an empty context.
  std::vector<double> encode_context(std::span<const ItemIndex> items) const;

  void score_all(std::span<const double> h, std::span<double> out) const;
  std::vector<double> score_all(std::span<const double> h) const;
  std::size_t rank_of(std::span<const double> h, ItemIndex item) const;

  using Model::score_context;
  void score_context(std::span<const ItemIndex> context, std::span<double> out) const override;
  std::unique_ptr<Model> clone() const override;

  bool all_finite() const;

 private:
  std::size_t num_items_;
  std::size_t dim_;
  double gamma_;
  std::vector<double> input_;
  std::vector<double> output_;
};

/// Gradient rows for a set of distinct items, row-major.
struct SparseGrad {
  ItemList rows;
  std::vector<double> values;

  std::span<const double> row(std::size_t k, std::size_t dim) const {
    return {values.data() + k * dim, dim};
  }
};

struct LossGrad {
  double loss = 0.0;
  SparseGrad input;   ///< d loss / d input embedding of each prefix item
  SparseGrad output;  ///< d loss / d output embedding of each candidate
};

/// Sampled-softmax cross-entropy over C = {target} u negatives:
///   L = -log softmax(h . o_target) over C.
/// Negatives must be distinct and exclude the target.
LossGrad loss_and_grad(const SeqEmbModel& model, std::span<const ItemIndex> prefix,
                       ItemIndex target, std::span<const ItemIndex> negatives);

/// Uniform sample of min(count, num_items - 1) distinct items, excluding
/// `target`.
template <typename RngT>
ItemList sample_negatives(std::size_t num_items, ItemIndex target, std::size_t count, RngT& rng);

struct TrainLog {
  std::vector<double> epoch_loss;        ///< mean per-step loss of every epoch run
  std::vector<double> epoch_valid_ndcg;  ///< validation NDCG@10 after every epoch (if any)
  int best_epoch = -1;                   ///< 0-based; -1 when no validation was available
  int epochs_run = 0;
};

/// Fresh fit: initialization, per-epoch shuffled SGD, early stopping on
/// validation NDCG@10 with best-snapshot restore.
SeqEmbModel train_seq_emb(const SplitView& view, std::size_t dim, double gamma,
                          const TrainConfig& cfg, std::uint64_t seed, TrainLog* log = nullptr);

/// Same procedure starting from `model`. Throws Error(Contract) when the
/// vocabulary size does not match.
SeqEmbModel fine_tune(const SeqEmbModel& model, const SplitView& view, const TrainConfig& cfg,
                      std::uint64_t seed, TrainLog* log = nullptr);

}  // namespace rsir

#include "rsir/seq_emb_inl.hpp"
