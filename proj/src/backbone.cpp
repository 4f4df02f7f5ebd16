#include "rsir/backbone.hpp"

#include <cmath>

#include "rsir/corpus.hpp"
#include "rsir/error.hpp"
#include "rsir/markov.hpp"
#include "rsir/seq_emb.hpp"

namespace rsir {

const char* backbone_name(BackboneKind kind) {
  return kind == BackboneKind::SeqEmb ? "seqemb" : "markov";
}

BackboneKind parse_backbone(const std::string& name) {
  if (name == "seqemb") return BackboneKind::SeqEmb;
  if (name == "markov") return BackboneKind::Markov;
  throw Error(ErrorKind::Config, "unknown backbone '" + name + "' (expected seqemb or markov)");
}

std::vector<double> Model::score_context(std::span<const ItemIndex> context) const {
  std::vector<double> out(num_items());
  score_context(context, out);
  return out;
}

std::size_t rank_in_scores(std::span<const double> scores, ItemIndex item) {
  const double s = scores[item];
  std::size_t ahead = 0;
  for (std::size_t u = 0; u < scores.size(); ++u) {
    ahead += (scores[u] > s) || (scores[u] == s && u < item);
  }
  return ahead + 1;
}

ItemIndex best_item(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t u = 1; u < scores.size(); ++u) {
    if (scores[u] > scores[best]) best = u;
  }
  return static_cast<ItemIndex>(best);
}

std::size_t rank_of(const Model& model, std::span<const ItemIndex> context, ItemIndex item) {
  const auto scores = model.score_context(context);
  return rank_in_scores(scores, item);
}

void validate(const TrainConfig& cfg) {
  ConfigProblems p;
  p.require(cfg.epochs >= 0, "train.epochs must be >= 0");
  p.require(cfg.learning_rate > 0.0, "train.lr must be > 0");
  p.require(cfg.negatives >= 1, "train.negatives must be >= 1");
  p.require(cfg.patience >= 1, "train.patience must be >= 1");
  p.raise();
}

void validate(const BackboneConfig& cfg) {
  ConfigProblems p;
  p.absorb([&] { validate(cfg.train); });
  p.require(cfg.dim >= 1, "model.dim must be >= 1");
  p.require(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "model.gamma must lie in (0, 1]");
  p.require(cfg.alpha > 0.0, "model.alpha must be > 0");
  p.raise();
}

std::unique_ptr<Model> fit_backbone(const BackboneConfig& cfg, const SplitView& view,
                                    std::uint64_t seed, const Model* warm_start) {
  if (cfg.kind == BackboneKind::Markov) {
    return std::make_unique<MarkovModel>(train_markov(view, cfg.alpha));
  }
  if (warm_start != nullptr) {
    const auto* prev = dynamic_cast<const SeqEmbModel*>(warm_start);
    if (prev == nullptr) throw Error(ErrorKind::Contract, "fine-tuning needs a seqemb warm start");
    return std::make_unique<SeqEmbModel>(fine_tune(*prev, view, cfg.train, seed));
  }
  return std::make_unique<SeqEmbModel>(train_seq_emb(view, cfg.dim, cfg.gamma, cfg.train, seed));
}

}  // namespace rsir
