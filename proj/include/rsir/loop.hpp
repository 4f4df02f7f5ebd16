#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsir/analysis.hpp"
#include "rsir/backbone.hpp"
#include "rsir/corpus.hpp"
#include "rsir/eval.hpp"
#include "rsir/generator.hpp"
#include "rsir/retrieval.hpp"

namespace rsir {

enum class Variant { Retrain, FineTune };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct RsirConfig {
  int iterations = 3;  ///< K
  Variant variant = Variant::Retrain;
  BackboneConfig backbone;
  GenerationConfig gen;
  BackendConfig backend;
  ApEnConfig apen;
  std::vector<int> ks{10, 20};
  std::uint64_t seed = 42;
  std::size_t workers = 1;
};

void validate(const RsirConfig& cfg);

struct IterationReport {
  int k = 0;
  std::size_t sequences = 0;  ///< N_k
  CorpusStats stats;
  std::optional<GenerationStats> generation;  ///< absent for the base model
  bool generation_empty = false;
  std::optional<double> apen_prime_mean;
  MetricsReport valid;
  MetricsReport test;
  double train_seconds = 0.0;
  double gen_seconds = 0.0;
};

/// Loop state between iterations: D_k, the frozen D_0 split and theta_k.
struct RsirState {
  Corpus corpus;
  SplitView frozen;
  std::unique_ptr<Model> model;
  int k = 0;
};

/// Fits theta_0 on D_0 and evaluates it (the k = 0 report).
std::pair<RsirState, IterationReport> start_rsir(const RsirConfig& cfg, const Corpus& corpus);

/// Generates D'_{k+1} with theta_k, expands to D_{k+1}, fits theta_{k+1}
/// (fresh for Retrain, warm-started for FineTune) and evaluates it on the
/// frozen targets.
IterationReport run_iteration(RsirState& state, const RsirConfig& cfg);

struct RsirRun {
  IterationReport base;
  std::vector<IterationReport> iterations;  ///< K entries, k = 1..K
  Corpus final_corpus;

  /// Base followed by every iteration.
  std::vector<IterationReport> all() const;
};

RsirRun run_rsir(const RsirConfig& cfg, const Corpus& corpus);

/// Seed used to fit theta_k.
std::uint64_t train_seed(std::uint64_t seed, int k);

struct MetricDelta {
  std::string name;
  double base = 0.0;
  double augmented = 0.0;
  double delta = 0.0;
};

struct WeakToStrongReport {
  BackboneKind teacher = BackboneKind::Markov;
  BackboneKind student = BackboneKind::SeqEmb;
  MetricsReport teacher_test;
  GenerationStats teacher_generation;
  std::size_t base_sequences = 0;
  std::size_t augmented_sequences = 0;
  MetricsReport student_base;
  MetricsReport student_augmented;
  std::vector<MetricDelta> deltas;
};

/// The teacher generates D'_1 under its own fidelity control; the student is
/// fitted from scratch on D_0 and on D_0 plus D'_1. Generation and backend
/// settings come from `cfg`; `cfg.backbone` is ignored.
WeakToStrongReport weak_to_strong(const BackboneConfig& teacher, const BackboneConfig& student,
                                  const RsirConfig& cfg, const Corpus& corpus);

}  // namespace rsir
