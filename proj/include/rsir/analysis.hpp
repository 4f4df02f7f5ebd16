#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rsir/corpus.hpp"

namespace rsir {

struct IterationReport;

struct ApEnConfig {
  int embed_m = 2;         ///< window length m (unrelated to generation trials)
  double tolerance = 0.0;  ///< r; 0 means windows match only when identical
};

/// Approximate entropy Phi^m(r) - Phi^{m+1}(r) with Chebyshev window
/// distance over item indices. Throws Error(Domain) when the sequence is
/// shorter than embed_m + 1.
double apen(std::span<const ItemIndex> sequence, const ApEnConfig& cfg);

/// 1 / ApEn, or nullopt when ApEn is exactly zero.
std::optional<double> apen_prime(std::span<const ItemIndex> sequence, const ApEnConfig& cfg);

struct InformationSummary {
  double mean_apen_prime = 0.0;
  std::size_t qualifying = 0;
  std::size_t zero_apen = 0;
  std::size_t too_short = 0;
};

/// Unweighted mean of ApEn' over sequences long enough for the window and
/// with nonzero ApEn. Throws Error(Domain) when none qualify.
InformationSummary dataset_information(std::span<const ItemList> sequences, const ApEnConfig& cfg,
                                       std::size_t workers = 1);
InformationSummary dataset_information(const Corpus& corpus, const ApEnConfig& cfg, std::size_t workers = 1);

struct DensityPoint {
  int k = 0;
  double density = 0.0;
  double relative_change = 0.0;  ///< versus the first report
};

std::vector<DensityPoint> density_trajectory(std::span<const IterationReport> reports);

}  // namespace rsir
