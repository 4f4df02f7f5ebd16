#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "rsir/analysis.hpp"
#include "rsir/checkpoint.hpp"
#include "rsir/config.hpp"
#include "rsir/error.hpp"
#include "rsir/eval.hpp"
#include "rsir/generator.hpp"
#include "rsir/loop.hpp"
#include "rsir/report.hpp"
#include "rsir/rng.hpp"
#include "rsir/simd/kernels.hpp"
#include "rsir/synth.hpp"
#include "rsir/theory.hpp"

namespace fs = std::filesystem;
using namespace rsir;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Io: return 3;
    case ErrorKind::Parse: return 4;
    case ErrorKind::EmptyCorpus: return 5;
    case ErrorKind::Load: return 6;
    case ErrorKind::Domain: return 7;
    case ErrorKind::Contract: return 8;
  }
  return 1;
}

/// State shared by every subcommand: the config file, per-key overrides and
/// the output directory once resolved.
struct Session {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  ExperimentConfig cfg;
  fs::path out;

  void resolve(const std::string& command) {
    if (!config_path.empty()) cfg = load_config(config_path);
    // Overrides apply in key order so the result does not depend on flag order.
    std::vector<std::pair<std::string, std::string>> settings;
    for (const auto& key : config_keys()) {
      if (auto it = overrides.find(key); it != overrides.end()) settings.emplace_back(key, it->second);
    }
    apply_settings(cfg, settings);
    validate(cfg);
    if (cfg.simd != "auto") simd::set_active_level(*simd::parse_level(cfg.simd));
    out = fs::path(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + out.string() + ": " + ec.message());
    write_text_file((out / "config.txt").string(), "# effective configuration of '" + command + "'\n" + format_config(cfg));
  }

  std::string path(const std::string& name) const { return (out / name).string(); }

  Json config_json() const {
    Json j = Json::object();
    std::istringstream in(format_config(cfg));
    for (const auto& [k, v] : parse_config_text(in)) j[k] = v;
    return j;
  }

  Json header(const std::string& command) const {
    Json j;
    j["command"] = command;
    j["config"] = config_json();
    j["simd"] = simd::level_name(simd::active_level());
    return j;
  }

  /// Loads, filters and (when configured) noises the dataset.
  Corpus corpus() const {
    if (cfg.dataset.empty()) throw Error(ErrorKind::Config, "dataset: no dataset path given");
    if (!fs::exists(cfg.dataset)) throw Error(ErrorKind::Io, "dataset not found: " + cfg.dataset);
    auto c = build_corpus(read_interactions_file(cfg.dataset), cfg.min_core);
    if (cfg.noise) c = inject_noise(c, *cfg.noise);
    return c;
  }

  void finish(const Json& results, const std::string& summary) const {
    write_json_file(path("results.json"), results);
    write_text_file(path("summary.txt"), summary);
    std::cout << summary;
  }
};

std::vector<double> parse_doubles(const std::string& what, const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, what + ": '" + part + "' is not a number");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Config, what + ": empty list");
  return out;
}

std::string run_summary(const RsirRun& run) {
  std::ostringstream s;
  for (const auto& r : run.all()) {
    s << "k=" << r.k << " N=" << r.sequences << " density=" << csv_number(r.stats.density);
    if (r.apen_prime_mean) s << " apen'=" << csv_number(*r.apen_prime_mean);
    for (const auto& m : r.test.at) {
      s << " ndcg@" << m.k << "=" << csv_number(m.ndcg) << " recall@" << m.k << "=" << csv_number(m.recall);
    }
    if (r.generation_empty) s << " (no sequence accepted)";
    s << '\n';
  }
  return s.str();
}

Json run_json(const RsirRun& run) {
  Json reports = Json::array();
  for (const auto& r : run.all()) reports.push_back(to_json(r));
  return reports;
}

void write_run_csvs(const Session& s, const RsirRun& run, const std::string& prefix = "") {
  const auto all = run.all();
  std::ostringstream trajectory;
  write_trajectory_csv(trajectory, all);
  write_text_file(s.path(prefix + "trajectory.csv"), trajectory.str());
  std::ostringstream timings;
  write_timings_csv(timings, all);
  write_text_file(s.path(prefix + "timings.csv"), timings.str());
}

void cmd_ingest(Session& s) {
  s.resolve("ingest");
  const auto corpus = s.corpus();
  const auto stats = corpus_stats(corpus);
  std::ofstream log(s.path("corpus.tsv"));
  if (!log) throw Error(ErrorKind::Io, "cannot write " + s.path("corpus.tsv"));
  write_interaction_log(log, corpus);
  auto j = s.header("ingest");
  j["stats"] = to_json(stats);
  s.finish(j, format_stats(stats));
}

std::unique_ptr<Model> train_model(const Session& s, const SplitView& view) {
  const auto r = s.cfg.effective_rsir();
  BackboneConfig b = r.backbone;
  b.train.workers = r.workers;
  return fit_backbone(b, view, train_seed(r.seed, 0));
}

std::string eval_summary(const MetricsReport& valid, const MetricsReport& test, bool has_valid) {
  std::string out;
  if (has_valid) out += "validation\n" + format_metrics(valid);
  return out + "test\n" + format_metrics(test);
}

void cmd_train(Session& s, const std::string& model_out) {
  s.resolve("train");
  const auto corpus = s.corpus();
  const auto view = split_leave_one_out(corpus);
  const auto model = train_model(s, view);
  const std::string path = model_out.empty() ? s.path("model.ckpt") : model_out;
  save_model(*model, path);
  const auto& ks = s.cfg.rsir.ks;
  MetricsReport valid;
  if (view.has_validation()) valid = evaluate(*model, view, ks, EvalTarget::Validation, s.cfg.workers);
  const auto test = evaluate(*model, view, ks, EvalTarget::Test, s.cfg.workers);
  auto j = s.header("train");
  j["checkpoint"] = path;
  j["stats"] = to_json(corpus_stats(corpus));
  if (view.has_validation()) j["valid"] = to_json(valid);
  j["test"] = to_json(test);
  s.finish(j, "checkpoint " + path + "\n" + eval_summary(valid, test, view.has_validation()));
}

std::unique_ptr<Model> model_for(const Session& s, const std::string& model_path, const Corpus& corpus,
                                 const SplitView& view) {
  if (model_path.empty()) return train_model(s, view);
  auto model = load_model(model_path);
  if (model->num_items() != corpus.num_items()) {
    throw Error(ErrorKind::Load, "checkpoint has " + std::to_string(model->num_items()) + " items but the corpus has " +
                                     std::to_string(corpus.num_items()));
  }
  return model;
}

void cmd_eval(Session& s, const std::string& model_path) {
  s.resolve("eval");
  if (model_path.empty()) throw Error(ErrorKind::Config, "--model: a checkpoint is required");
  const auto corpus = s.corpus();
  const auto view = split_leave_one_out(corpus);
  const auto model = model_for(s, model_path, corpus, view);
  const auto& ks = s.cfg.rsir.ks;
  MetricsReport valid;
  if (view.has_validation()) valid = evaluate(*model, view, ks, EvalTarget::Validation, s.cfg.workers);
  const auto test = evaluate(*model, view, ks, EvalTarget::Test, s.cfg.workers);
  auto j = s.header("eval");
  j["checkpoint"] = model_path;
  if (view.has_validation()) j["valid"] = to_json(valid);
  j["test"] = to_json(test);
  s.finish(j, eval_summary(valid, test, view.has_validation()));
}

void cmd_generate(Session& s, const std::string& model_path) {
  s.resolve("generate");
  const auto corpus = s.corpus();
  const auto view = split_leave_one_out(corpus);
  const auto model = model_for(s, model_path, corpus, view);
  const auto r = s.cfg.effective_rsir();
  GenerationConfig gen = r.gen;
  gen.seed = derive_seed(r.seed, {0x6E4});
  gen.workers = r.workers;
  const auto checker = make_checker(r.backend, *model, derive_seed(r.seed, {0x1D7, 1}));
  const auto result = generate_dataset(*model, corpus, gen, *checker, 1, &view);
  std::ofstream out(s.path("generated.tsv"));
  if (!out) throw Error(ErrorKind::Io, "cannot write " + s.path("generated.tsv"));
  write_sequences(out, corpus, result.sequences);
  auto j = s.header("generate");
  j["generation"] = to_json(result.stats);
  std::ostringstream summary;
  summary << "sources " << result.stats.sources << "\ntrials " << result.stats.trials << "\naccepted "
          << result.stats.accepted_sequences << "\ninteractions " << result.stats.generated_interactions
          << "\nstep_acceptance " << csv_number(result.stats.step_acceptance_rate) << "\nmean_effective_length "
          << csv_number(result.stats.mean_effective_length) << '\n';
  s.finish(j, summary.str());
}

void cmd_rsir(Session& s) {
  s.resolve("rsir");
  const auto run = run_rsir(s.cfg.effective_rsir(), s.corpus());
  write_run_csvs(s, run);
  auto j = s.header("rsir");
  j["reports"] = run_json(run);
  s.finish(j, run_summary(run));
}

void cmd_noise_sweep(Session& s, const std::string& etas_text) {
  s.resolve("noise-sweep");
  const auto etas = parse_doubles("--etas", etas_text);
  if (s.cfg.dataset.empty()) throw Error(ErrorKind::Config, "dataset: no dataset path given");
  const auto clean = build_corpus(read_interactions_file(s.cfg.dataset), s.cfg.min_core);
  const std::uint64_t noise_seed = s.cfg.noise ? s.cfg.noise->seed : derive_seed(s.cfg.seed, {0x4015E});
  std::ostringstream csv, summary;
  csv << "eta,k,ndcg@10,recall@10\n";
  Json runs = Json::array();
  for (double eta : etas) {
    const auto corpus = inject_noise(clean, {eta, noise_seed});
    const auto run = run_rsir(s.cfg.effective_rsir(), corpus);
    for (const auto& r : run.all()) {
      csv << csv_number(eta) << ',' << r.k << ',' << csv_number(r.test.get(10).ndcg) << ','
          << csv_number(r.test.get(10).recall) << '\n';
    }
    const auto& first = run.base.test.get(10);
    const auto& last = (run.iterations.empty() ? run.base : run.iterations.back()).test.get(10);
    summary << "eta=" << csv_number(eta) << " base ndcg@10=" << csv_number(first.ndcg)
            << " final ndcg@10=" << csv_number(last.ndcg) << " delta=" << csv_number(last.ndcg - first.ndcg) << '\n';
    runs.push_back({{"eta", eta}, {"reports", run_json(run)}});
  }
  write_text_file(s.path("noise_sweep.csv"), csv.str());
  auto j = s.header("noise-sweep");
  j["runs"] = runs;
  s.finish(j, summary.str());
}

void cmd_weak_to_strong(Session& s) {
  s.resolve("weak-to-strong");
  const auto r = s.cfg.effective_rsir();
  const auto report = weak_to_strong(s.cfg.teacher, r.backbone, r, s.corpus());
  std::ostringstream summary;
  summary << "teacher " << backbone_name(report.teacher) << " student " << backbone_name(report.student) << '\n';
  summary << "sequences " << report.base_sequences << " -> " << report.augmented_sequences << '\n';
  for (const auto& d : report.deltas) {
    summary << d.name << " base=" << csv_number(d.base) << " augmented=" << csv_number(d.augmented)
            << " delta=" << csv_number(d.delta) << '\n';
  }
  auto j = s.header("weak-to-strong");
  j["report"] = to_json(report);
  s.finish(j, summary.str());
}

struct TheoryArgs {
  theory::ErrorDynamicsParams params;
  double e_start = -1.0;  // negative: start from e0
  int steps = 50;
};

void cmd_theory(Session& s, const TheoryArgs& a) {
  s.resolve("theory");
  theory::validate(a.params);
  const double start = a.e_start < 0.0 ? a.params.e0 : a.e_start;
  const auto sim = theory::simulate(a.params, start, a.steps);
  std::ostringstream csv;
  write_theory_csv(csv, sim);
  write_text_file(s.path("theory.csv"), csv.str());

  auto j = s.header("theory");
  j["params"] = {{"lambda", a.params.lambda}, {"rho", a.params.rho}, {"p_tilde", a.params.p_tilde},
                 {"e0", a.params.e0},         {"e_max", a.params.e_max}};
  j["e_start"] = start;
  j["trend"] = theory::trend_name(sim.trend);
  j["final"] = sim.series.back();
  j["limit"] = theory::limit(a.params);
  std::ostringstream summary;
  summary.setf(std::ios::fixed);
  summary.precision(6);
  if (a.params.p_tilde == 0.0) {
    const double fp = theory::fixed_point(a.params);
    j["fixed_point"] = fp;
    summary << "fixed point " << fp << '\n';
  }
  summary << "limit " << theory::limit(a.params) << '\n';
  if (a.params.lambda > 0.0 && a.params.e_max > a.params.rho * start) {
    const double th = theory::breakdown_threshold(a.params, start);
    j["breakdown_threshold"] = th;
    summary << "breakdown threshold at e=" << start << ": " << th << '\n';
  }
  summary << "trend " << theory::trend_name(sim.trend) << " final " << sim.series.back() << '\n';
  s.finish(j, summary.str());
}

std::vector<std::string> split_list(const std::string& what, const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  if (out.empty()) throw Error(ErrorKind::Config, what + ": empty list");
  return out;
}

void cmd_grid(Session& s, const std::string& taus_text, const std::string& ps_text, const std::string& ms_text) {
  s.resolve("grid");
  const auto taus = split_list("--taus", taus_text);
  const auto ps = split_list("--ps", ps_text);
  const auto ms = split_list("--ms", ms_text);
  const auto corpus = s.corpus();
  std::ostringstream csv;
  csv << "tau,p,m,valid_ndcg@10,test_ndcg@10,test_recall@10\n";
  Json cells = Json::array();
  double best_valid = -1.0;
  std::string best;
  for (const auto& tau : taus) {
    for (const auto& p : ps) {
      for (const auto& m : ms) {
        auto cfg = s.cfg;
        apply_settings(cfg, {{"gen.tau", tau}, {"gen.p", p}, {"gen.m", m}});
        validate(cfg);
        const auto run = run_rsir(cfg.effective_rsir(), corpus);
        const auto& last = run.iterations.empty() ? run.base : run.iterations.back();
        const double valid = last.valid.at.empty() ? 0.0 : last.valid.get(10).ndcg;
        csv << tau << ',' << p << ',' << m << ',' << csv_number(valid) << ',' << csv_number(last.test.get(10).ndcg)
            << ',' << csv_number(last.test.get(10).recall) << '\n';
        cells.push_back({{"tau", tau}, {"p", p}, {"m", m}, {"reports", run_json(run)}});
        if (valid > best_valid) {
          best_valid = valid;
          best = "tau=" + tau + " p=" + p + " m=" + m;
        }
      }
    }
  }
  write_text_file(s.path("grid.csv"), csv.str());
  auto j = s.header("grid");
  j["cells"] = cells;
  j["best"] = best;
  s.finish(j, csv.str() + "best by validation ndcg@10: " + best + '\n');
}

void cmd_synth(Session& s, std::size_t users, std::size_t items, int order, const std::string& file) {
  s.resolve("synth");
  const auto world = synth_world(users, items, order, s.cfg.seed);
  const std::string path = file.empty() ? s.path("synth.tsv") : file;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  write_interactions(out, world.log);
  out.close();
  Json succ = Json::array();
  for (const auto& row : world.successors) succ.push_back({row[0], row[1], row[2]});
  auto j = s.header("synth");
  j["file"] = path;
  j["users"] = users;
  j["items"] = items;
  j["interactions"] = world.log.size();
  j["successors"] = succ;
  s.finish(j, "wrote " + std::to_string(world.log.size()) + " interactions to " + path + '\n');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive self-improving recommendation laboratory"};
  app.require_subcommand(1);
  Session session;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", session.config_path, "Configuration file (key = value lines)");
    // Every configuration key doubles as a flag; flags override the file.
    for (const auto& key : config_keys()) {
      sub->add_option_function<std::string>(
          "--" + key, [&session, key](const std::string& v) { session.overrides[key] = v; },
          "Override configuration key " + key);
    }
  };

  std::string model_path;
  std::string etas = "0,0.1,0.2,0.3";
  TheoryArgs theory_args;
  std::string taus = "10,20,50", ps = "0.2,0.5,0.8", ms = "1,5";
  std::size_t synth_users = 500, synth_items = 50;
  int synth_order = 1;
  std::string synth_file;

  std::vector<std::pair<CLI::App*, std::function<void()>>> commands;
  auto command = [&](const std::string& name, const std::string& help, std::function<void()> run) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    commands.emplace_back(sub, std::move(run));
    return sub;
  };

  command("ingest", "Filter a dataset and report its statistics", [&] { cmd_ingest(session); });
  command("train", "Fit the backbone on the leave-one-out split and save a checkpoint",
          [&] { cmd_train(session, model_path); })
      ->add_option("--model", model_path, "Checkpoint output path (default <out>/model.ckpt)");
  command("eval", "Evaluate a checkpoint", [&] { cmd_eval(session, model_path); })
      ->add_option("--model", model_path, "Checkpoint to evaluate");
  command("generate", "Run one round of quality-controlled generation", [&] { cmd_generate(session, model_path); })
      ->add_option("--model", model_path, "Checkpoint to generate with (default: train one)");
  command("rsir", "Run the full train, generate, expand loop", [&] { cmd_rsir(session); });
  command("noise-sweep", "Run the loop on noised copies of the dataset", [&] { cmd_noise_sweep(session, etas); })
      ->add_option("--etas", etas, "Comma-separated noise ratios");
  command("weak-to-strong", "Generate with the teacher backbone and train the student",
          [&] { cmd_weak_to_strong(session); });
  auto* th = command("theory", "Simulate the recursive error bound", [&] { cmd_theory(session, theory_args); });
  th->add_option("--lambda", theory_args.params.lambda, "Share of generated data");
  th->add_option("--rho", theory_args.params.rho, "Contraction rate");
  th->add_option("--p-tilde", theory_args.params.p_tilde, "Fidelity leakage rate");
  th->add_option("--e0", theory_args.params.e0, "Baseline error");
  th->add_option("--e-max", theory_args.params.e_max, "Loss bound on invalid data");
  th->add_option("--e-start", theory_args.e_start, "Starting error (default e0)");
  th->add_option("--steps", theory_args.steps, "Number of iterations")->check(CLI::PositiveNumber);
  auto* grid = command("grid", "Grid search over tau, p and m", [&] { cmd_grid(session, taus, ps, ms); });
  grid->add_option("--taus", taus, "Comma-separated rank thresholds");
  grid->add_option("--ps", ps, "Comma-separated exploitation probabilities");
  grid->add_option("--ms", ms, "Comma-separated trial counts");
  auto* synth = command("synth", "Write a synthetic Markov-world interaction log",
                        [&] { cmd_synth(session, synth_users, synth_items, synth_order, synth_file); });
  synth->add_option("--users", synth_users, "Number of users");
  synth->add_option("--items", synth_items, "Number of items");
  synth->add_option("--order", synth_order, "Markov order (only 1)");
  synth->add_option("--file", synth_file, "Output file (default <out>/synth.tsv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; a bad command line is a configuration error.
    return app.exit(e) == 0 ? 0 : exit_code(ErrorKind::Config);
  }

  try {
    for (auto& [sub, run] : commands) {
      if (sub->parsed()) run();
    }
  } catch (const Error& e) {
    std::cerr << "error [" << error_kind_name(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
