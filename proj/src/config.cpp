#include "rsir/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "rsir/error.hpp"
#include "rsir/simd/kernels.hpp"

namespace rsir {

RsirConfig ExperimentConfig::effective_rsir() const {
  RsirConfig out = rsir;
  out.seed = seed;
  out.workers = workers;
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw Error(ErrorKind::Config, key + ": expected a number, got '" + value + "'");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_number<int>(key, trim(tok)));
  if (out.empty()) throw Error(ErrorKind::Config, key + ": expected a comma-separated list");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T, typename Access>
Field number_field(Access access) {
  return {[access](ExperimentConfig& c, const std::string& key, const std::string& v) {
            access(c) = parse_number<T>(key, v);
          },
          [access](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(access(c));
            } else {
              return std::to_string(access(c));
            }
          }};
}

NoiseConfig& noise_of(ExperimentConfig& c) {
  if (!c.noise) c.noise = NoiseConfig{};
  return *c.noise;
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("dataset", Field{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.dataset = v; },
                                    [](const ExperimentConfig& c) { return c.dataset; }});
    t.emplace_back("min_core", number_field<int>([](auto& c) -> auto& { return c.min_core; }));
    t.emplace_back("out", Field{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                                [](const ExperimentConfig& c) { return c.out_dir; }});
    t.emplace_back("seed", number_field<std::uint64_t>([](auto& c) -> auto& { return c.seed; }));
    t.emplace_back("workers", number_field<std::size_t>([](auto& c) -> auto& { return c.workers; }));
    t.emplace_back("simd", Field{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.simd = v; },
                                 [](const ExperimentConfig& c) { return c.simd; }});

    t.emplace_back("model.kind",
                   Field{[](ExperimentConfig& c, const std::string&, const std::string& v) {
                           c.rsir.backbone.kind = parse_backbone(v);
                         },
                         [](const ExperimentConfig& c) { return std::string(backbone_name(c.rsir.backbone.kind)); }});
    t.emplace_back("model.dim", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.backbone.dim; }));
    t.emplace_back("model.gamma", number_field<double>([](auto& c) -> auto& { return c.rsir.backbone.gamma; }));
    t.emplace_back("model.alpha", number_field<double>([](auto& c) -> auto& { return c.rsir.backbone.alpha; }));
    t.emplace_back("train.epochs", number_field<int>([](auto& c) -> auto& { return c.rsir.backbone.train.epochs; }));
    t.emplace_back("train.lr", number_field<double>([](auto& c) -> auto& { return c.rsir.backbone.train.learning_rate; }));
    t.emplace_back("train.negatives", number_field<int>([](auto& c) -> auto& { return c.rsir.backbone.train.negatives; }));
    t.emplace_back("train.patience", number_field<int>([](auto& c) -> auto& { return c.rsir.backbone.train.patience; }));

    t.emplace_back("gen.tau", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.gen.tau; }));
    t.emplace_back("gen.m", number_field<int>([](auto& c) -> auto& { return c.rsir.gen.trials; }));
    t.emplace_back("gen.p", number_field<double>([](auto& c) -> auto& { return c.rsir.gen.p; }));
    t.emplace_back("gen.top_k", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.gen.top_k; }));
    t.emplace_back("gen.max_len", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.gen.max_len; }));
    t.emplace_back("gen.min_len", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.gen.min_len; }));
    t.emplace_back("gen.explore_pool", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.gen.explore_pool_size; }));

    t.emplace_back("rsir.iterations", number_field<int>([](auto& c) -> auto& { return c.rsir.iterations; }));
    t.emplace_back("rsir.variant",
                   Field{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.rsir.variant = parse_variant(v); },
                         [](const ExperimentConfig& c) { return std::string(variant_name(c.rsir.variant)); }});

    t.emplace_back("backend.kind",
                   Field{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.rsir.backend.kind = parse_backend(v); },
                         [](const ExperimentConfig& c) { return std::string(backend_name(c.rsir.backend.kind)); }});
    t.emplace_back("backend.clusters", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.backend.clusters; }));
    t.emplace_back("backend.top_c", number_field<std::size_t>([](auto& c) -> auto& { return c.rsir.backend.top_c; }));
    t.emplace_back("backend.kmeans_iters", number_field<int>([](auto& c) -> auto& { return c.rsir.backend.kmeans_iters; }));

    t.emplace_back("teacher.kind",
                   Field{[](ExperimentConfig& c, const std::string&, const std::string& v) { c.teacher.kind = parse_backbone(v); },
                         [](const ExperimentConfig& c) { return std::string(backbone_name(c.teacher.kind)); }});
    t.emplace_back("teacher.dim", number_field<std::size_t>([](auto& c) -> auto& { return c.teacher.dim; }));
    t.emplace_back("teacher.gamma", number_field<double>([](auto& c) -> auto& { return c.teacher.gamma; }));
    t.emplace_back("teacher.alpha", number_field<double>([](auto& c) -> auto& { return c.teacher.alpha; }));

    // seed before eta: "noise.eta = none" must be the last word on noise.
    t.emplace_back("noise.seed",
                   Field{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                           noise_of(c).seed = parse_number<std::uint64_t>(key, v);
                         },
                         [](const ExperimentConfig& c) { return std::to_string(c.noise ? c.noise->seed : 0); }});

    t.emplace_back("noise.eta",
                   Field{[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                           if (v.empty() || v == "none") {
                             c.noise.reset();
                           } else {
                             noise_of(c).eta = parse_number<double>(key, v);
                           }
                         },
                         [](const ExperimentConfig& c) { return c.noise ? format_double(c.noise->eta) : std::string("none"); }});
    t.emplace_back("apen.m", number_field<int>([](auto& c) -> auto& { return c.rsir.apen.embed_m; }));
    t.emplace_back("apen.r", number_field<double>([](auto& c) -> auto& { return c.rsir.apen.tolerance; }));
    t.emplace_back("eval.ks",
                   Field{[](ExperimentConfig& c, const std::string& key, const std::string& v) { c.rsir.ks = parse_int_list(key, v); },
                         [](const ExperimentConfig& c) { return join(c.rsir.ks); }});
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, f] : fields()) out.push_back(k);
    return out;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, f] : fields()) {
    if (k != key) continue;
    try {
      f.set(cfg, key, value);
    } catch (const Error& e) {
      const std::string what = e.what();
      throw Error(ErrorKind::Config, what.rfind(key, 0) == 0 ? what : key + ": " + what);
    }
    return;
  }
  throw Error(ErrorKind::Config, key + ": unknown configuration key");
}

void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings) {
  std::string problems;
  for (const auto& [k, v] : settings) {
    try {
      apply_setting(cfg, k, v);
    } catch (const Error& e) {
      problems += (problems.empty() ? "" : "; ") + std::string(e.what());
    }
  }
  if (!problems.empty()) throw Error(ErrorKind::Config, "invalid configuration: " + problems);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path);
  ExperimentConfig cfg;
  apply_settings(cfg, parse_config_text(in));
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  ConfigProblems p;
  p.require(cfg.min_core >= 1, "min_core must be >= 1");
  p.require(cfg.workers >= 1, "workers must be >= 1");
  p.require(cfg.simd == "auto" || simd::parse_level(cfg.simd).has_value(), "simd must be auto, scalar, avx2 or neon");
  p.absorb([&] { validate(cfg.effective_rsir()); });
  p.absorb([&] { validate(cfg.teacher); });
  p.require(!cfg.noise || (cfg.noise->eta >= 0.0 && cfg.noise->eta <= 0.8), "noise.eta must lie in [0, 0.8]");
  p.require(cfg.rsir.apen.embed_m >= 1, "apen.m must be >= 1");
  p.require(cfg.rsir.apen.tolerance >= 0.0, "apen.r must be >= 0");
  if (!p.empty()) {
    try {
      p.raise();
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, std::string("invalid configuration: ") + e.what());
    }
  }
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace rsir
