#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rsir/backbone.hpp"
#include "rsir/corpus.hpp"
#include "rsir/retrieval.hpp"
#include "rsir/rng.hpp"

namespace rsir {

struct GenerationConfig {
  std::size_t tau = 20;            ///< rank threshold of the fidelity check
  int trials = 5;                  ///< m: trajectories attempted per source sequence
  double p = 0.5;                  ///< probability of the exploitation pool
  std::size_t top_k = 10;          ///< sampling truncation inside the pool
  std::size_t max_len = 50;        ///< T
  std::size_t min_len = 2;
  std::size_t explore_pool_size = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

void validate(const GenerationConfig& cfg);

enum class PoolSource { Exploit, Explore };

struct CandidatePool {
  ItemList items;
  PoolSource source = PoolSource::Exploit;
};

/// With probability p: the distinct items of the user's sequence. Otherwise:
/// explore_pool_size items sampled without replacement from the vocabulary.
CandidatePool build_candidate_pool(std::span<const ItemIndex> sequence, std::size_t num_items, double p,
                                   std::size_t explore_pool_size, Rng& rng);

/// Keeps the top_k pool items by model score (ties to the smaller index) and
/// samples one from the softmax of their scores.
ItemIndex sample_next(const Model& model, std::span<const ItemIndex> context, std::span<const ItemIndex> pool,
                      std::size_t top_k, Rng& rng);

/// Same, from precomputed full-vocabulary scores.
ItemIndex sample_from_scores(std::span<const double> scores, std::span<const ItemIndex> pool, std::size_t top_k,
                             Rng& rng);

/// Result of one trajectory attempt.
struct Trajectory {
  std::optional<ItemList> items;     ///< set when at least one step was accepted and min_len holds
  std::size_t prefix_len = 0;        ///< j, the seeded true prefix length
  std::size_t attempted_steps = 0;   ///< fidelity checks made (the stopping time L_e)
  std::size_t accepted_steps = 0;
};

/// One quality-controlled rollout from a random true prefix of `sequence`.
/// Each step samples from a fresh hybrid pool and keeps the item only if
/// some remaining true item still ranks within tau; the first failure ends
/// the rollout. Returns no sequence when nothing was accepted.
Trajectory generate_trajectory(const Model& model, std::span<const ItemIndex> sequence,
                               const GenerationConfig& cfg, const FidelityChecker& checker, Rng& rng);

struct GenerationStats {
  std::size_t sources = 0;
  std::size_t trials = 0;
  std::size_t accepted_sequences = 0;
  std::size_t dedup_dropped = 0;
  std::size_t short_dropped = 0;
  std::size_t attempted_steps = 0;
  std::size_t accepted_steps = 0;
  std::size_t generated_interactions = 0;
  double mean_effective_length = 0.0;  ///< mean stopping time over trials
  double step_acceptance_rate = 0.0;
};

struct GenerationResult {
  std::vector<InteractionSequence> sequences;
  GenerationStats stats;
};

/// A sequence the generator extends, paired with its owner.
struct GenerationSource {
  UserIndex user = 0;
  ItemList items;
};

/// The original sequences of the corpus as sources; generated sequences
/// never seed further generation. With `holdout`, each is cut to its
/// training prefix so held-out targets never feed generation. Sources
/// shorter than 2 items are skipped.
std::vector<GenerationSource> generation_sources(const Corpus& corpus, const SplitView* holdout);

/// m trajectories per source, run in parallel with one RNG per
/// (seed, iteration, source, trial). Drops short results, exact duplicates of
/// the same user's existing sequences and repeats of earlier accepted
/// generations. Output order follows (source, trial).
GenerationResult generate_dataset(const Model& model, const Corpus& corpus,
                                  std::span<const GenerationSource> sources, const GenerationConfig& cfg,
                                  const FidelityChecker& checker, int iteration);

/// Convenience overload: sources from generation_sources(corpus, holdout).
GenerationResult generate_dataset(const Model& model, const Corpus& corpus, const GenerationConfig& cfg,
                                  const FidelityChecker& checker, int iteration,
                                  const SplitView* holdout = nullptr);

// Heuristic augmenters. Both add new generated copies of the original
// sequences through expand(), so duplicates are dropped the same way.

/// Copies each original sequence and inserts ceil(ratio * n) uniform random
/// items at uniform positions. Sequences are visited in a seeded random
/// order; with max_added > 0, passes repeat with fresh draws until that
/// many interactions were added (or a pass adds nothing new).
Corpus baseline_insert(const Corpus& corpus, double ratio, std::uint64_t seed, const SplitView* holdout = nullptr,
                       std::size_t max_added = 0);

/// Copies each original sequence and shuffles one random window of
/// min(window, n) consecutive items.
Corpus baseline_reorder(const Corpus& corpus, std::size_t window, std::uint64_t seed,
                        const SplitView* holdout = nullptr, std::size_t max_added = 0);

}  // namespace rsir
