#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsir/backbone.hpp"
#include "rsir/corpus.hpp"

namespace rsir {

struct RankMetrics {
  double ndcg = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double mrr = 0.0;
};

/// Single-target leave-one-out metrics for one ranked user.
RankMetrics metrics_from_rank(std::size_t rank, int k);

/// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

struct MetricsAtK {
  int k = 10;
  double ndcg = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double mrr = 0.0;
};

struct MetricsReport {
  std::vector<MetricsAtK> at;
  std::size_t evaluated_users = 0;

  /// Throws Error(Contract) when k was not evaluated.
  const MetricsAtK& get(int k) const;
};

enum class EvalTarget { Validation, Test };

/// Full-vocabulary rank of the user's held-out target. Test context is the
/// whole sequence minus the test item; validation context is the train prefix.
std::size_t rank_for_user(const Model& model, const UserSplit& user, EvalTarget target);

/// One rank per user that has the requested target, in split order.
std::vector<std::size_t> rank_users(const Model& model, const SplitView& view, EvalTarget target,
                                    std::size_t workers = 1);

/// Per-user metrics are averaged; F1 is computed from the averaged precision
/// and recall. Throws Error(Domain) on an empty rank list.
MetricsReport metrics_from_ranks(std::span<const std::size_t> ranks, std::span<const int> ks);

MetricsReport evaluate(const Model& model, const SplitView& view, std::span<const int> ks,
                       EvalTarget target = EvalTarget::Test, std::size_t workers = 1);

inline constexpr int kDefaultKs[] = {10, 20};

}  // namespace rsir
