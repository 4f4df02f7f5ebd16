#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsir/backbone.hpp"

namespace rsir {

class SeqEmbModel;

/// k-means partition of the output item embeddings. Queries probe the top_c
/// clusters by centroid . h and rank only their members.
struct ClusterIndex {
  std::size_t num_items = 0;
  std::size_t dim = 0;
  std::size_t clusters = 0;
  std::size_t top_c = 1;
  std::vector<double> centroids;          ///< clusters x dim, row-major
  std::vector<std::uint32_t> assignment;  ///< item -> cluster
  std::vector<ItemList> members;          ///< cluster -> ascending items
  std::vector<double> objective;          ///< Lloyd objective after each update step
  int iterations = 0;

  std::span<const double> centroid(std::size_t c) const { return {centroids.data() + c * dim, dim}; }
};

/// Default cluster count: ceil(sqrt(num_items)).
std::size_t default_cluster_count(std::size_t num_items);

ClusterIndex build_index(const SeqEmbModel& model, std::size_t clusters, std::size_t top_c,
                         int kmeans_iters, std::uint64_t seed);

/// Ascending union of the members of the top_c clusters for h.
ItemList approx_candidates(const ClusterIndex& index, std::span<const double> h);

/// Rank of `item` within the probed candidates, or nullopt when it was not
/// probed.
std::optional<std::size_t> approx_rank_of(const ClusterIndex& index, const SeqEmbModel& model,
                                          std::span<const double> h, ItemIndex item);

/// Decides whether a provisional context still ranks some held-out true
/// item within tau.
class FidelityChecker {
 public:
  virtual ~FidelityChecker() = default;
  virtual bool accept(const Model& model, std::span<const ItemIndex> context,
                      std::span<const ItemIndex> targets, std::size_t tau) const = 0;
  virtual std::string name() const = 0;
};

/// Full-vocabulary scan; works with any backbone.
class ExactFidelity final : public FidelityChecker {
 public:
  bool accept(const Model& model, std::span<const ItemIndex> context,
              std::span<const ItemIndex> targets, std::size_t tau) const override;
  std::string name() const override { return "exact"; }
};

/// Cluster-restricted ranking. Targets outside the probed clusters count as
/// misses; probed targets are ranked among the probed items only. Requires
/// the seqemb model the index was built from.
class ClusteredFidelity final : public FidelityChecker {
 public:
  explicit ClusteredFidelity(ClusterIndex index) : index_(std::move(index)) {}
  bool accept(const Model& model, std::span<const ItemIndex> context,
              std::span<const ItemIndex> targets, std::size_t tau) const override;
  std::string name() const override { return "clustered"; }
  const ClusterIndex& index() const { return index_; }

 private:
  ClusterIndex index_;
};

inline bool fidelity_accept(const FidelityChecker& checker, const Model& model,
                            std::span<const ItemIndex> context, std::span<const ItemIndex> targets,
                            std::size_t tau) {
  return checker.accept(model, context, targets, tau);
}

struct FidelityState {
  ItemList context;
  ItemList targets;
  std::size_t tau = 1;
};

struct Agreement {
  std::size_t states = 0;
  std::size_t agreed = 0;
  double fraction = 0.0;
  double ci_low = 0.0;   ///< Wilson 95% interval
  double ci_high = 0.0;
};

/// Fraction of states where both checkers return the same decision.
Agreement agreement_report(const Model& model, const FidelityChecker& a, const FidelityChecker& b,
                           std::span<const FidelityState> states);

enum class BackendKind { Exact, Clustered };

struct BackendConfig {
  BackendKind kind = BackendKind::Exact;
  std::size_t clusters = 0;  ///< 0 = default_cluster_count
  std::size_t top_c = 3;
  int kmeans_iters = 25;
};

BackendKind parse_backend(const std::string& name);
const char* backend_name(BackendKind kind);

/// Exact for any model; clustered needs a seqemb model and is rebuilt from
/// its current embeddings.
std::unique_ptr<FidelityChecker> make_checker(const BackendConfig& cfg, const Model& model,
                                              std::uint64_t seed);

}  // namespace rsir
