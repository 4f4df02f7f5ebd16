#include "rsir/seq_emb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rsir/corpus.hpp"
#include "rsir/error.hpp"
#include "rsir/eval.hpp"
#include "rsir/rng.hpp"
#include "rsir/simd/kernels.hpp"

namespace rsir {

SeqEmbModel::SeqEmbModel(std::size_t num_items, std::size_t dim, double gamma)
    : num_items_(num_items),
      dim_(dim),
      gamma_(gamma),
      input_(num_items * dim, 0.0),
      output_(num_items * dim, 0.0) {
  if (dim == 0) throw Error(ErrorKind::Config, "embedding dimension must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::Config, "gamma must lie in (0, 1]");
}

SeqEmbModel SeqEmbModel::initialized(std::size_t num_items, std::size_t dim, double gamma,
                                     std::uint64_t seed) {
  SeqEmbModel model(num_items, dim, gamma);
  Rng rng = make_rng(seed, {0x1417});
  const double bound = 0.5 / static_cast<double>(dim);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : model.input_) v = dist(rng);
  for (auto& v : model.output_) v = dist(rng);
  return model;
}

std::span<const double> SeqEmbModel::input_row(ItemIndex item) const {
  return {input_.data() + static_cast<std::size_t>(item) * dim_, dim_};
}
std::span<double> SeqEmbModel::input_row(ItemIndex item) {
  return {input_.data() + static_cast<std::size_t>(item) * dim_, dim_};
}
std::span<const double> SeqEmbModel::output_row(ItemIndex item) const {
  return {output_.data() + static_cast<std::size_t>(item) * dim_, dim_};
}
std::span<double> SeqEmbModel::output_row(ItemIndex item) {
  return {output_.data() + static_cast<std::size_t>(item) * dim_, dim_};
}

namespace {

/// w_j = gamma^(n-1-j), most recent first gets weight 1.
std::vector<double> decay_weights(std::size_t n, double gamma) {
  std::vector<double> w(n);
  double cur = 1.0;
  for (std::size_t j = n; j-- > 0;) {
    w[j] = cur;
    cur *= gamma;
  }
  return w;
}

}  // namespace

std::vector<double> SeqEmbModel::encode_context(std::span<const ItemIndex> items) const {
  if (items.empty()) throw Error(ErrorKind::Contract, "cannot encode an empty context");
  const auto w = decay_weights(items.size(), gamma_);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> h(dim_, 0.0);
  for (std::size_t j = 0; j < items.size(); ++j) {
    if (items[j] >= num_items_) throw Error(ErrorKind::Contract, "context item out of range");
    simd::axpy(w[j] / total, input_row(items[j]), h);
  }
  return h;
}

void SeqEmbModel::score_all(std::span<const double> h, std::span<double> out) const {
  if (h.size() != dim_ || out.size() != num_items_) {
    throw Error(ErrorKind::Contract, "score_all: dimension mismatch");
  }
  simd::matvec(output_, dim_, h, out);
}

std::vector<double> SeqEmbModel::score_all(std::span<const double> h) const {
  std::vector<double> out(num_items_);
  score_all(h, out);
  return out;
}

std::size_t SeqEmbModel::rank_of(std::span<const double> h, ItemIndex item) const {
  return rank_in_scores(score_all(h), item);
}

void SeqEmbModel::score_context(std::span<const ItemIndex> context, std::span<double> out) const {
  score_all(encode_context(context), out);
}

std::unique_ptr<Model> SeqEmbModel::clone() const { return std::make_unique<SeqEmbModel>(*this); }

bool SeqEmbModel::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(input_.begin(), input_.end(), finite) &&
         std::all_of(output_.begin(), output_.end(), finite);
}

LossGrad loss_and_grad(const SeqEmbModel& model, std::span<const ItemIndex> prefix,
                       ItemIndex target, std::span<const ItemIndex> negatives) {
  const std::size_t d = model.dim();
  const auto h = model.encode_context(prefix);

  ItemList cands;
  cands.reserve(negatives.size() + 1);
  cands.push_back(target);
  for (ItemIndex v : negatives) {
    if (v == target) throw Error(ErrorKind::Contract, "negatives must exclude the target");
    cands.push_back(v);
  }

  std::vector<double> scores(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) scores[c] = simd::dot(h, model.output_row(cands[c]));
  const double peak = *std::max_element(scores.begin(), scores.end());
  const double target_logit = scores[0] - peak;
  double z = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - peak);
    z += s;
  }

  LossGrad out;
  out.loss = std::log(z) - target_logit;

  // dL/dh = sum_c (p_c - y_c) o_c ; dL/do_c = (p_c - y_c) h
  std::vector<double> grad_h(d, 0.0);
  out.output.rows = cands;
  out.output.values.assign(cands.size() * d, 0.0);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const double coeff = scores[c] / z - (c == 0 ? 1.0 : 0.0);
    simd::axpy(coeff, model.output_row(cands[c]), grad_h);
    simd::axpy(coeff, h, std::span<double>(out.output.values.data() + c * d, d));
  }

  // h = sum_j w_j e_j / W, so dL/de_{i_j} = (w_j / W) dL/dh, merged per item.
  const auto w = decay_weights(prefix.size(), model.gamma());
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    auto it = std::find(out.input.rows.begin(), out.input.rows.end(), prefix[j]);
    std::size_t slot;
    if (it == out.input.rows.end()) {
      slot = out.input.rows.size();
      out.input.rows.push_back(prefix[j]);
      out.input.values.resize(out.input.values.size() + d, 0.0);
    } else {
      slot = static_cast<std::size_t>(it - out.input.rows.begin());
    }
    simd::axpy(w[j] / total, grad_h, std::span<double>(out.input.values.data() + slot * d, d));
  }
  return out;
}

namespace {

double sgd_epoch(SeqEmbModel& model, const std::vector<const ItemList*>& seqs,
                 const TrainConfig& cfg, std::uint64_t seed, int epoch) {
  Rng rng = make_rng(seed, {0xE90C, static_cast<std::uint64_t>(epoch)});
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t d = model.dim();
  double loss_sum = 0.0;
  std::size_t steps = 0;
  for (std::size_t idx : order) {
    const ItemList& s = *seqs[idx];
    for (std::size_t t = 1; t < s.size(); ++t) {
      const auto negs = sample_negatives(model.num_items(), s[t],
                                         static_cast<std::size_t>(cfg.negatives), rng);
      const auto g = loss_and_grad(model, std::span(s).first(t), s[t], negs);
      loss_sum += g.loss;
      ++steps;
      for (std::size_t k = 0; k < g.output.rows.size(); ++k) {
        simd::axpy(-cfg.learning_rate, g.output.row(k, d), model.output_row(g.output.rows[k]));
      }
      for (std::size_t k = 0; k < g.input.rows.size(); ++k) {
        simd::axpy(-cfg.learning_rate, g.input.row(k, d), model.input_row(g.input.rows[k]));
      }
    }
  }
  return steps == 0 ? 0.0 : loss_sum / static_cast<double>(steps);
}

SeqEmbModel run_training(SeqEmbModel model, const SplitView& view, const TrainConfig& cfg,
                         std::uint64_t seed, TrainLog* log) {
  validate(cfg);
  const auto seqs = view.training_sequences();
  const bool early_stop = view.has_validation();
  const int ks[] = {10};

  TrainLog local;
  TrainLog& out = log != nullptr ? *log : local;
  out = TrainLog{};

  SeqEmbModel best = model;
  double best_ndcg = -1.0;
  int since_best = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    out.epoch_loss.push_back(sgd_epoch(model, seqs, cfg, seed, epoch));
    out.epochs_run = epoch + 1;
    if (!early_stop) continue;
    const double ndcg =
        evaluate(model, view, ks, EvalTarget::Validation, cfg.workers).get(10).ndcg;
    out.epoch_valid_ndcg.push_back(ndcg);
    if (ndcg > best_ndcg) {
      best_ndcg = ndcg;
      best = model;
      out.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  if (!early_stop || out.best_epoch < 0) return model;
  return best;
}

}  // namespace

SeqEmbModel train_seq_emb(const SplitView& view, std::size_t dim, double gamma,
                          const TrainConfig& cfg, std::uint64_t seed, TrainLog* log) {
  if (view.users.empty() && view.extra_train.empty()) {
    throw Error(ErrorKind::Contract, "training view is empty");
  }
  return run_training(SeqEmbModel::initialized(view.num_items, dim, gamma, seed), view, cfg, seed,
                      log);
}

SeqEmbModel fine_tune(const SeqEmbModel& model, const SplitView& view, const TrainConfig& cfg,
                      std::uint64_t seed, TrainLog* log) {
  if (model.num_items() != view.num_items) {
    throw Error(ErrorKind::Contract, "fine_tune: model has " + std::to_string(model.num_items()) +
                                         " items, data has " + std::to_string(view.num_items));
  }
  return run_training(model, view, cfg, seed, log);
}

}  // namespace rsir
