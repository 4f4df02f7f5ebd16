#include "rsir/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rsir/error.hpp"
#include "rsir/parallel.hpp"

namespace rsir {

void validate(const GenerationConfig& cfg) {
  ConfigProblems p;
  p.require(cfg.tau >= 1, "gen.tau must be >= 1");
  p.require(cfg.trials >= 0, "gen.m must be >= 0");
  p.require(cfg.p >= 0.0 && cfg.p <= 1.0, "gen.p must lie in [0, 1]");
  p.require(cfg.top_k >= 1, "gen.top_k must be >= 1");
  p.require(cfg.min_len >= 2, "gen.min_len must be >= 2");
  p.require(cfg.min_len <= cfg.max_len, "gen.min_len must not exceed gen.max_len");
  p.require(cfg.explore_pool_size >= 1, "gen.explore_pool must be >= 1");
  p.raise();
}

namespace {

ItemList distinct_in_order(std::span<const ItemIndex> items) {
  ItemList out;
  for (ItemIndex v : items) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace

CandidatePool build_candidate_pool(std::span<const ItemIndex> sequence, std::size_t num_items, double p,
                                   std::size_t explore_pool_size, Rng& rng) {
  if (sequence.empty()) throw Error(ErrorKind::Contract, "candidate pool needs a nonempty sequence");
  std::bernoulli_distribution exploit(p);
  if (exploit(rng)) return {distinct_in_order(sequence), PoolSource::Exploit};
  return {sample_distinct(num_items, explore_pool_size, rng), PoolSource::Explore};
}

ItemIndex sample_from_scores(std::span<const double> scores, std::span<const ItemIndex> pool, std::size_t top_k,
                             Rng& rng) {
  if (pool.empty()) throw Error(ErrorKind::Contract, "cannot sample from an empty pool");
  ItemList ranked(pool.begin(), pool.end());
  const std::size_t keep = std::min(top_k, ranked.size());
  auto better = [&](ItemIndex a, ItemIndex b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), better);
  ranked.resize(keep);

  const double peak = scores[ranked.front()];
  std::vector<double> weights(keep);
  for (std::size_t k = 0; k < keep; ++k) weights[k] = std::exp(scores[ranked[k]] - peak);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng) * std::accumulate(weights.begin(), weights.end(), 0.0);
  for (std::size_t k = 0; k < keep; ++k) {
    if (u < weights[k]) return ranked[k];
    u -= weights[k];
  }
  return ranked.back();
}

ItemIndex sample_next(const Model& model, std::span<const ItemIndex> context, std::span<const ItemIndex> pool,
                      std::size_t top_k, Rng& rng) {
  const auto scores = model.score_context(context);
  return sample_from_scores(scores, pool, top_k, rng);
}

Trajectory generate_trajectory(const Model& model, std::span<const ItemIndex> sequence,
                               const GenerationConfig& cfg, const FidelityChecker& checker, Rng& rng) {
  const std::size_t n = sequence.size();
  if (n < 2) throw Error(ErrorKind::Contract, "generation needs a source of at least 2 items");
  Trajectory out;
  std::uniform_int_distribution<std::size_t> pick_prefix(1, n - 1);
  out.prefix_len = pick_prefix(rng);

  ItemList context(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(out.prefix_len));
  ItemList targets;
  for (ItemIndex v : distinct_in_order(sequence)) {
    if (std::find(context.begin(), context.end(), v) == context.end()) targets.push_back(v);
  }

  while (context.size() < cfg.max_len && !targets.empty()) {
    const auto pool = build_candidate_pool(sequence, model.num_items(), cfg.p, cfg.explore_pool_size, rng);
    const ItemIndex next = sample_next(model, context, pool.items, cfg.top_k, rng);
    context.push_back(next);
    ++out.attempted_steps;
    if (!checker.accept(model, context, targets, cfg.tau)) {
      context.pop_back();
      break;
    }
    ++out.accepted_steps;
    targets.erase(std::remove(targets.begin(), targets.end(), next), targets.end());
  }
  if (out.accepted_steps > 0 && context.size() >= cfg.min_len) out.items = std::move(context);
  return out;
}

std::vector<GenerationSource> generation_sources(const Corpus& corpus, const SplitView* holdout) {
  std::vector<GenerationSource> out;
  std::size_t original = 0;
  for (const auto& seq : corpus.sequences()) {
    if (seq.origin.generated || seq.items.size() < 2) continue;  // short originals are absent from the split too
    GenerationSource src{seq.user, seq.items};
    if (holdout != nullptr) {
      if (original >= holdout->users.size() || holdout->users[original].user != seq.user) {
        throw Error(ErrorKind::Contract, "holdout split does not match the corpus originals");
      }
      src.items = holdout->users[original].train;
    }
    ++original;
    if (src.items.size() >= 2) out.push_back(std::move(src));
  }
  return out;
}

GenerationResult generate_dataset(const Model& model, const Corpus& corpus,
                                  std::span<const GenerationSource> sources, const GenerationConfig& cfg,
                                  const FidelityChecker& checker, int iteration) {
  validate(cfg);
  if (model.num_items() != corpus.num_items()) {
    throw Error(ErrorKind::Contract, "model vocabulary does not match the corpus");
  }
  const std::size_t m = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<Trajectory>> per_source(sources.size());
  parallel_for(sources.size(), cfg.workers, [&](std::size_t s) {
    per_source[s].reserve(m);
    for (std::size_t trial = 0; trial < m; ++trial) {
      Rng rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(iteration), sources[s].user, s, trial});
      per_source[s].push_back(generate_trajectory(model, sources[s].items, cfg, checker, rng));
    }
  });

  GenerationResult result;
  auto& st = result.stats;
  st.sources = sources.size();
  std::set<std::pair<UserIndex, ItemList>> accepted;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (auto& traj : per_source[s]) {
      ++st.trials;
      st.attempted_steps += traj.attempted_steps;
      st.accepted_steps += traj.accepted_steps;
      if (!traj.items) {
        ++st.short_dropped;
        continue;
      }
      const UserIndex user = sources[s].user;
      if (corpus.contains(user, *traj.items) || !accepted.emplace(user, *traj.items).second) {
        ++st.dedup_dropped;
        continue;
      }
      st.generated_interactions += traj.items->size();
      result.sequences.push_back({user, std::move(*traj.items), Origin::from_iteration(iteration)});
    }
  }
  st.accepted_sequences = result.sequences.size();
  if (st.trials > 0) {
    st.mean_effective_length = static_cast<double>(st.attempted_steps) / static_cast<double>(st.trials);
  }
  if (st.attempted_steps > 0) {
    st.step_acceptance_rate = static_cast<double>(st.accepted_steps) / static_cast<double>(st.attempted_steps);
  }
  return result;
}

GenerationResult generate_dataset(const Model& model, const Corpus& corpus, const GenerationConfig& cfg,
                                  const FidelityChecker& checker, int iteration, const SplitView* holdout) {
  const auto sources = generation_sources(corpus, holdout);
  return generate_dataset(model, corpus, sources, cfg, checker, iteration);
}

}  // namespace rsir
