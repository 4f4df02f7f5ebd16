#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rsir/types.hpp"

namespace rsir {

struct SplitView;

enum class BackboneKind { SeqEmb, Markov };

const char* backbone_name(BackboneKind kind);
BackboneKind parse_backbone(const std::string& name);

/// The model contract f_theta: anything that scores every item given a
/// context of item indices. Fitted models are immutable and shared
/// read-only between generation and evaluation workers.
class Model {
 public:
  virtual ~Model() = default;

  virtual BackboneKind kind() const = 0;
  virtual std::size_t num_items() const = 0;

  /// Writes exactly num_items() finite scores.
  virtual void score_context(std::span<const ItemIndex> context, std::span<double> out) const = 0;

  virtual std::unique_ptr<Model> clone() const = 0;

  std::vector<double> score_context(std::span<const ItemIndex> context) const;
};

/// 1-based rank of `item` in `scores`: higher score first, ties broken by the
/// smaller item index.
std::size_t rank_in_scores(std::span<const double> scores, ItemIndex item);

/// Index of the best item under the same ordering as rank_in_scores.
ItemIndex best_item(std::span<const double> scores);

std::size_t rank_of(const Model& model, std::span<const ItemIndex> context, ItemIndex item);

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.05;
  int negatives = 64;
  int patience = 20;
  /// Threads for per-epoch validation; results do not depend on it.
  std::size_t workers = 1;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Everything needed to fit a backbone of either kind.
struct BackboneConfig {
  BackboneKind kind = BackboneKind::SeqEmb;
  std::size_t dim = 32;
  double gamma = 0.8;
  double alpha = 0.1;
  TrainConfig train;

  friend bool operator==(const BackboneConfig&, const BackboneConfig&) = default;
};

void validate(const TrainConfig& cfg);
void validate(const BackboneConfig& cfg);

/// Fits a backbone on `view`. With `warm_start` (same kind and vocabulary)
/// the embedding backbone fine-tunes instead of starting fresh; the count
/// model always refits from scratch since its counts are sufficient
/// statistics of the data.
std::unique_ptr<Model> fit_backbone(const BackboneConfig& cfg, const SplitView& view,
                                    std::uint64_t seed, const Model* warm_start = nullptr);

}  // namespace rsir
