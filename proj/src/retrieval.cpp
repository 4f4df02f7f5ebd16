#include "rsir/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsir/error.hpp"
#include "rsir/rng.hpp"
#include "rsir/seq_emb.hpp"
#include "rsir/simd/kernels.hpp"

namespace rsir {

std::size_t default_cluster_count(std::size_t num_items) {
  const auto c = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_items))));
  return std::max<std::size_t>(1, c);
}

namespace {

struct Nearest {
  std::uint32_t cluster = 0;
  double dist = 0.0;
};

Nearest nearest_centroid(std::span<const double> x, const std::vector<double>& centroids,
                         std::size_t count, std::size_t dim) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < count; ++c) {
    const double dist = simd::squared_l2(x, std::span<const double>(centroids.data() + c * dim, dim));
    if (dist < best.dist) best = {static_cast<std::uint32_t>(c), dist};
  }
  return best;
}

}  // namespace

ClusterIndex build_index(const SeqEmbModel& model, std::size_t clusters, std::size_t top_c,
                         int kmeans_iters, std::uint64_t seed) {
  const std::size_t n = model.num_items();
  const std::size_t d = model.dim();
  if (clusters < 1 || clusters > n) {
    throw Error(ErrorKind::Config, "cluster count must lie in [1, " + std::to_string(n) + "]");
  }
  if (top_c < 1 || top_c > clusters) throw Error(ErrorKind::Config, "top_c must lie in [1, clusters]");

  ClusterIndex index;
  index.num_items = n;
  index.dim = d;
  index.clusters = clusters;
  index.top_c = top_c;
  index.centroids.assign(clusters * d, 0.0);
  auto point = [&](std::size_t i) { return model.output_row(static_cast<ItemIndex>(i)); };
  auto centroid = [&](std::size_t c) { return std::span<double>(index.centroids.data() + c * d, d); };

  // Farthest-point seeding from a random first item.
  Rng rng = make_rng(seed, {0xC1A5});
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < clusters; ++c) {
    std::copy(point(pick).begin(), point(pick).end(), centroid(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], simd::squared_l2(point(i), centroid(c)));
    }
    pick = static_cast<std::size_t>(std::max_element(min_dist.begin(), min_dist.end()) - min_dist.begin());
  }

  index.assignment.assign(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<double> dist(n, 0.0);
  for (int iter = 0; iter < std::max(1, kmeans_iters); ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto best = nearest_centroid(point(i), index.centroids, clusters, d);
      dist[i] = best.dist;
      if (index.assignment[i] != best.cluster) {
        index.assignment[i] = best.cluster;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<std::size_t> sizes(clusters, 0);
    std::fill(index.centroids.begin(), index.centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      simd::axpy(1.0, point(i), centroid(index.assignment[i]));
      ++sizes[index.assignment[i]];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (sizes[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(sizes[c]);
      for (auto& v : centroid(c)) v *= inv;
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = simd::squared_l2(point(i), centroid(index.assignment[i]));
      objective += dist[i];
    }
    // An empty cluster takes over the point farthest from its own centroid.
    // Nothing is assigned to it yet, so the objective above is unaffected.
    for (std::size_t c = 0; c < clusters; ++c) {
      if (sizes[c] != 0) continue;
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      std::copy(point(far).begin(), point(far).end(), centroid(c).begin());
      dist[far] = 0.0;
    }
    index.objective.push_back(objective);
    index.iterations = iter + 1;
  }

  index.members.assign(clusters, {});
  for (std::size_t i = 0; i < n; ++i) index.members[index.assignment[i]].push_back(static_cast<ItemIndex>(i));
  return index;
}

ItemList approx_candidates(const ClusterIndex& index, std::span<const double> h) {
  if (h.size() != index.dim) throw Error(ErrorKind::Contract, "query dimension mismatch");
  std::vector<double> sims(index.clusters);
  simd::matvec(index.centroids, index.dim, h, sims);
  std::vector<std::size_t> order(index.clusters);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(index.top_c), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return sims[a] > sims[b] || (sims[a] == sims[b] && a < b);
                    });
  ItemList out;
  for (std::size_t k = 0; k < index.top_c; ++k) {
    const auto& m = index.members[order[k]];
    out.insert(out.end(), m.begin(), m.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check_index(const ClusterIndex& index, const SeqEmbModel& model) {
  if (index.num_items != model.num_items() || index.dim != model.dim()) {
    throw Error(ErrorKind::Contract, "cluster index was built for a different model shape");
  }
}

/// Best target among the candidates and its rank within them.
std::optional<std::size_t> best_rank_in_candidates(const SeqEmbModel& model, std::span<const double> h,
                                                   const ItemList& cands,
                                                   std::span<const ItemIndex> targets) {
  std::vector<double> scores(cands.size());
  for (std::size_t k = 0; k < cands.size(); ++k) scores[k] = simd::dot(h, model.output_row(cands[k]));
  std::optional<std::size_t> best;
  for (ItemIndex t : targets) {
    auto it = std::lower_bound(cands.begin(), cands.end(), t);
    if (it == cands.end() || *it != t) continue;
    const auto pos = static_cast<std::size_t>(it - cands.begin());
    if (!best || scores[pos] > scores[*best] || (scores[pos] == scores[*best] && cands[pos] < cands[*best])) {
      best = pos;
    }
  }
  if (!best) return std::nullopt;
  const double s = scores[*best];
  std::size_t ahead = 0;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    ahead += (scores[k] > s) || (scores[k] == s && cands[k] < cands[*best]);
  }
  return ahead + 1;
}

}  // namespace

std::optional<std::size_t> approx_rank_of(const ClusterIndex& index, const SeqEmbModel& model,
                                          std::span<const double> h, ItemIndex item) {
  check_index(index, model);
  const auto cands = approx_candidates(index, h);
  const ItemIndex one[] = {item};
  return best_rank_in_candidates(model, h, cands, one);
}

bool ExactFidelity::accept(const Model& model, std::span<const ItemIndex> context,
                           std::span<const ItemIndex> targets, std::size_t tau) const {
  if (targets.empty()) return false;
  const auto scores = model.score_context(context);
  // The best-ordered target has the smallest rank of all targets.
  ItemIndex best = targets[0];
  for (ItemIndex t : targets) {
    if (scores[t] > scores[best] || (scores[t] == scores[best] && t < best)) best = t;
  }
  return rank_in_scores(scores, best) <= tau;
}

bool ClusteredFidelity::accept(const Model& model, std::span<const ItemIndex> context,
                               std::span<const ItemIndex> targets, std::size_t tau) const {
  if (targets.empty()) return false;
  const auto* emb = dynamic_cast<const SeqEmbModel*>(&model);
  if (emb == nullptr) throw Error(ErrorKind::Contract, "clustered fidelity needs a seqemb model");
  check_index(index_, *emb);
  const auto h = emb->encode_context(context);
  const auto cands = approx_candidates(index_, h);
  const auto rank = best_rank_in_candidates(*emb, h, cands, targets);
  return rank && *rank <= tau;
}

Agreement agreement_report(const Model& model, const FidelityChecker& a, const FidelityChecker& b,
                           std::span<const FidelityState> states) {
  if (states.empty()) throw Error(ErrorKind::Domain, "agreement needs at least one state");
  Agreement out;
  out.states = states.size();
  for (const auto& s : states) {
    out.agreed += a.accept(model, s.context, s.targets, s.tau) == b.accept(model, s.context, s.targets, s.tau);
  }
  const double n = static_cast<double>(out.states);
  const double p = static_cast<double>(out.agreed) / n;
  out.fraction = p;
  const double z = 1.96;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  out.ci_low = std::max(0.0, centre - half);
  out.ci_high = std::min(1.0, centre + half);
  return out;
}

BackendKind parse_backend(const std::string& name) {
  if (name == "exact") return BackendKind::Exact;
  if (name == "clustered") return BackendKind::Clustered;
  throw Error(ErrorKind::Config, "unknown fidelity backend '" + name + "' (expected exact or clustered)");
}

const char* backend_name(BackendKind kind) { return kind == BackendKind::Exact ? "exact" : "clustered"; }

std::unique_ptr<FidelityChecker> make_checker(const BackendConfig& cfg, const Model& model,
                                              std::uint64_t seed) {
  if (cfg.kind == BackendKind::Exact) return std::make_unique<ExactFidelity>();
  const auto* emb = dynamic_cast<const SeqEmbModel*>(&model);
  if (emb == nullptr) throw Error(ErrorKind::Config, "the clustered backend requires a seqemb model");
  const std::size_t clusters = cfg.clusters == 0 ? default_cluster_count(emb->num_items()) : cfg.clusters;
  const std::size_t top_c = std::min(cfg.top_c, clusters);
  return std::make_unique<ClusteredFidelity>(build_index(*emb, clusters, top_c, cfg.kmeans_iters, seed));
}

}  // namespace rsir
