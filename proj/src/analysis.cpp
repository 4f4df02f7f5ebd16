#include "rsir/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rsir/error.hpp"
#include "rsir/loop.hpp"
#include "rsir/parallel.hpp"

namespace rsir {

namespace {

/// Number of windows of length dim within distance r of each window.
std::vector<std::size_t> window_matches(std::span<const ItemIndex> s, std::size_t dim, double r) {
  const std::size_t windows = s.size() - dim + 1;
  std::vector<std::size_t> matches(windows, 0);
  if (r == 0.0) {
    // Identical windows only: sort window starts lexicographically and count
    // equal runs.
    std::vector<std::size_t> order(windows);
    for (std::size_t k = 0; k < windows; ++k) order[k] = k;
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(s.begin() + a, s.begin() + a + dim, s.begin() + b, s.begin() + b + dim);
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t start = 0;
    for (std::size_t k = 1; k <= windows; ++k) {
      if (k == windows || less(order[start], order[k])) {
        for (std::size_t q = start; q < k; ++q) matches[order[q]] = k - start;
        start = k;
      }
    }
  } else {
    for (std::size_t a = 0; a < windows; ++a) {
      for (std::size_t b = 0; b < windows; ++b) {
        double dist = 0.0;
        for (std::size_t q = 0; q < dim; ++q) {
          dist = std::max(dist, std::abs(static_cast<double>(s[a + q]) - static_cast<double>(s[b + q])));
        }
        matches[a] += dist <= r;
      }
    }
  }
  return matches;
}

/// Mean of ln(matches) over windows. Phi^dim = this - ln(windows).
long double mean_log_matches(const std::vector<std::size_t>& matches) {
  long double sum = 0.0L;
  for (std::size_t c : matches) sum += std::log(static_cast<long double>(c));
  return sum / static_cast<long double>(matches.size());
}

// Rounding residue left when Phi^m and Phi^{m+1} agree exactly. Nonzero
// ApEn values of sequences this short are many orders of magnitude larger.
constexpr double kZeroResidue = 1e-13;

}  // namespace

double apen(std::span<const ItemIndex> sequence, const ApEnConfig& cfg) {
  if (cfg.embed_m < 1) throw Error(ErrorKind::Config, "apen.m must be >= 1");
  if (!(cfg.tolerance >= 0.0)) throw Error(ErrorKind::Config, "apen.r must be >= 0");
  const auto m = static_cast<std::size_t>(cfg.embed_m);
  if (sequence.size() < m + 1) {
    throw Error(ErrorKind::Domain, "ApEn needs at least m + 1 = " + std::to_string(m + 1) + " items");
  }
  // Phi^m - Phi^{m+1} with the window counts split off:
  //   [mean ln C^m - mean ln C^{m+1}] + ln(W_{m+1} / W_m),  W_{m+1} = W_m - 1.
  const auto windows = static_cast<double>(sequence.size() - m + 1);
  const long double counts = mean_log_matches(window_matches(sequence, m, cfg.tolerance)) -
                             mean_log_matches(window_matches(sequence, m + 1, cfg.tolerance));
  const double value = static_cast<double>(counts + std::log1p(-1.0 / windows));
  return std::abs(value) < kZeroResidue ? 0.0 : value;
}

std::optional<double> apen_prime(std::span<const ItemIndex> sequence, const ApEnConfig& cfg) {
  const double a = apen(sequence, cfg);
  if (a == 0.0) return std::nullopt;
  return 1.0 / a;
}

InformationSummary dataset_information(std::span<const ItemList> sequences, const ApEnConfig& cfg,
                                       std::size_t workers) {
  const auto min_len = static_cast<std::size_t>(std::max(cfg.embed_m, 0)) + 1;
  std::vector<std::optional<double>> values(sequences.size());
  parallel_for(sequences.size(), workers, [&](std::size_t i) {
    if (sequences[i].size() >= min_len) values[i] = apen_prime(sequences[i], cfg);
  });
  InformationSummary out;
  double sum = 0.0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].size() < min_len) {
      ++out.too_short;
    } else if (!values[i]) {
      ++out.zero_apen;
    } else {
      sum += *values[i];
      ++out.qualifying;
    }
  }
  if (out.qualifying == 0) throw Error(ErrorKind::Domain, "no sequence qualifies for ApEn'");
  out.mean_apen_prime = sum / static_cast<double>(out.qualifying);
  return out;
}

InformationSummary dataset_information(const Corpus& corpus, const ApEnConfig& cfg, std::size_t workers) {
  std::vector<ItemList> seqs;
  seqs.reserve(corpus.num_sequences());
  for (const auto& s : corpus.sequences()) seqs.push_back(s.items);
  return dataset_information(seqs, cfg, workers);
}

std::vector<DensityPoint> density_trajectory(std::span<const IterationReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::Domain, "density trajectory needs at least one report");
  std::vector<DensityPoint> out;
  const double first = reports.front().stats.density;
  for (const auto& r : reports) {
    const double rel = first == 0.0 ? 0.0 : (r.stats.density - first) / first;
    out.push_back({r.k, r.stats.density, rel});
  }
  return out;
}

}  // namespace rsir
