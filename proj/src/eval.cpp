#include "rsir/eval.hpp"

#include <cmath>

#include "rsir/error.hpp"
#include "rsir/parallel.hpp"

namespace rsir {

RankMetrics metrics_from_rank(std::size_t rank, int k) {
  RankMetrics m;
  if (rank == 0 || k < 1) throw Error(ErrorKind::Contract, "rank and K must be >= 1");
  if (rank > static_cast<std::size_t>(k)) return m;
  m.recall = 1.0;
  m.ndcg = 1.0 / std::log2(static_cast<double>(rank) + 1.0);
  m.precision = 1.0 / static_cast<double>(k);
  m.mrr = 1.0 / static_cast<double>(rank);
  return m;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

const MetricsAtK& MetricsReport::get(int k) const {
  for (const auto& m : at) {
    if (m.k == k) return m;
  }
  throw Error(ErrorKind::Contract, "metrics at K=" + std::to_string(k) + " were not computed");
}

std::size_t rank_for_user(const Model& model, const UserSplit& user, EvalTarget target) {
  if (target == EvalTarget::Validation) {
    if (!user.valid) throw Error(ErrorKind::Contract, "user has no validation target");
    return rank_of(model, user.train, *user.valid);
  }
  return rank_of(model, user.test_context(), user.test);
}

std::vector<std::size_t> rank_users(const Model& model, const SplitView& view, EvalTarget target,
                                    std::size_t workers) {
  std::vector<const UserSplit*> eligible;
  for (const auto& u : view.users) {
    if (target == EvalTarget::Test || u.valid) eligible.push_back(&u);
  }
  std::vector<std::size_t> ranks(eligible.size());
  parallel_for(eligible.size(), workers,
               [&](std::size_t i) { ranks[i] = rank_for_user(model, *eligible[i], target); });
  return ranks;
}

MetricsReport metrics_from_ranks(std::span<const std::size_t> ranks, std::span<const int> ks) {
  if (ranks.empty()) throw Error(ErrorKind::Domain, "no evaluable users");
  MetricsReport report;
  report.evaluated_users = ranks.size();
  const double n = static_cast<double>(ranks.size());
  for (int k : ks) {
    MetricsAtK m;
    m.k = k;
    for (std::size_t r : ranks) {
      const auto one = metrics_from_rank(r, k);
      m.ndcg += one.ndcg;
      m.recall += one.recall;
      m.mrr += one.mrr;
    }
    m.ndcg /= n;
    m.recall /= n;
    m.mrr /= n;
    m.precision = m.recall / static_cast<double>(k);
    m.f1 = f1_score(m.precision, m.recall);
    report.at.push_back(m);
  }
  return report;
}

MetricsReport evaluate(const Model& model, const SplitView& view, std::span<const int> ks,
                       EvalTarget target, std::size_t workers) {
  const auto ranks = rank_users(model, view, target, workers);
  return metrics_from_ranks(ranks, ks);
}

}  // namespace rsir
