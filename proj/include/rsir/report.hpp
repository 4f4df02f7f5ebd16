#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "vendor_json.hpp"
#include "rsir/corpus.hpp"
#include "rsir/eval.hpp"
#include "rsir/generator.hpp"
#include "rsir/loop.hpp"
#include "rsir/theory.hpp"

namespace rsir {

using Json = nlohmann::ordered_json;

// Structured results use fixed key order so that reruns diff cleanly.

Json to_json(const CorpusStats& s);
Json to_json(const MetricsReport& m);
Json to_json(const GenerationStats& g);
Json to_json(const IterationReport& r);
Json to_json(const WeakToStrongReport& r);

/// Flat "key value" lines for a terminal.
std::string format_stats(const CorpusStats& s);
std::string format_metrics(const MetricsReport& m);

/// Fixed-precision number formatting used in every CSV.
std::string csv_number(double v);

/// k, N_k, density, apen_prime, ndcg@10, recall@10, ndcg@20, recall@20.
/// Deterministic for a fixed seed; wall-clock timings go to timings CSV.
void write_trajectory_csv(std::ostream& out, std::span<const IterationReport> reports);

/// k, train_seconds, gen_seconds.
void write_timings_csv(std::ostream& out, std::span<const IterationReport> reports);

/// k, error series of a theory simulation.
void write_theory_csv(std::ostream& out, const theory::Simulation& sim);

void write_text_file(const std::string& path, const std::string& text);
void write_json_file(const std::string& path, const Json& j);

}  // namespace rsir
