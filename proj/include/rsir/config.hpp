#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsir/analysis.hpp"
#include "rsir/backbone.hpp"
#include "rsir/corpus.hpp"
#include "rsir/loop.hpp"

namespace rsir {

/// Every knob of an experiment. Serialized as "key = value" lines with
/// dotted keys; see config_keys() for the full list.
struct ExperimentConfig {
  std::string dataset;
  int min_core = 5;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::string simd = "auto";

  RsirConfig rsir;             ///< backbone, generation, backend, apen, eval Ks
  BackboneConfig teacher{BackboneKind::Markov, 32, 0.8, 0.1, {}};
  std::optional<NoiseConfig> noise;

  /// rsir with the top-level seed and worker count applied.
  RsirConfig effective_rsir() const;
};

/// Key names in serialization order.
const std::vector<std::string>& config_keys();

/// Applies one setting. Throws Error(Config) naming the key on an unknown
/// key or a malformed value.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Applies many settings and reports every offending key at once.
void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings);

/// Parses "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Cross-field validation of the whole configuration.
void validate(const ExperimentConfig& cfg);

std::string format_config(const ExperimentConfig& cfg);

}  // namespace rsir
