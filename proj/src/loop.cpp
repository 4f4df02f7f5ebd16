#include "rsir/loop.hpp"

#include <algorithm>
#include <chrono>

#include "rsir/error.hpp"
#include "rsir/rng.hpp"

namespace rsir {

const char* variant_name(Variant v) { return v == Variant::Retrain ? "retrain" : "finetune"; }

Variant parse_variant(const std::string& name) {
  if (name == "retrain") return Variant::Retrain;
  if (name == "finetune") return Variant::FineTune;
  throw Error(ErrorKind::Config, "unknown variant '" + name + "' (expected retrain or finetune)");
}

void validate(const RsirConfig& cfg) {
  ConfigProblems p;
  p.require(cfg.iterations >= 1, "rsir.iterations must be >= 1");
  p.require(!cfg.ks.empty(), "eval.ks must not be empty");
  p.require(std::all_of(cfg.ks.begin(), cfg.ks.end(), [](int k) { return k >= 1; }), "eval.ks entries must be >= 1");
  p.require(cfg.workers >= 1, "workers must be >= 1");
  p.absorb([&] { validate(cfg.backbone); });
  p.absorb([&] { validate(cfg.gen); });
  p.raise();
}

std::uint64_t train_seed(std::uint64_t seed, int k) {
  return derive_seed(seed, {0x7A1, static_cast<std::uint64_t>(k)});
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GenerationConfig generation_config(const RsirConfig& cfg) {
  GenerationConfig gen = cfg.gen;
  gen.seed = derive_seed(cfg.seed, {0x6E4});
  gen.workers = cfg.workers;
  return gen;
}

BackboneConfig backbone_config(const BackboneConfig& b, std::size_t workers) {
  BackboneConfig out = b;
  out.train.workers = workers;
  return out;
}

std::optional<double> information(const Corpus& corpus, const RsirConfig& cfg) {
  try {
    return dataset_information(corpus, cfg.apen, cfg.workers).mean_apen_prime;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Domain) return std::nullopt;
    throw;
  }
}

void fill_report(IterationReport& report, const Model& model, const RsirState& state, const RsirConfig& cfg) {
  report.sequences = state.corpus.num_sequences();
  report.stats = corpus_stats(state.corpus);
  report.apen_prime_mean = information(state.corpus, cfg);
  const auto view = training_view(state.frozen, state.corpus);
  if (view.has_validation()) report.valid = evaluate(model, view, cfg.ks, EvalTarget::Validation, cfg.workers);
  report.test = evaluate(model, view, cfg.ks, EvalTarget::Test, cfg.workers);
}

/// Generation step shared by the loop and the weak-to-strong experiment.
GenerationResult generate_next(const Model& model, const Corpus& corpus, const SplitView& frozen,
                               const RsirConfig& cfg, int iteration) {
  const auto checker = make_checker(cfg.backend, model, derive_seed(cfg.seed, {0x1D7, static_cast<std::uint64_t>(iteration)}));
  return generate_dataset(model, corpus, generation_config(cfg), *checker, iteration, &frozen);
}

}  // namespace

std::pair<RsirState, IterationReport> start_rsir(const RsirConfig& cfg, const Corpus& corpus) {
  validate(cfg);
  RsirState state;
  state.corpus = corpus;
  state.frozen = split_leave_one_out(corpus);
  if (!state.frozen.extra_train.empty()) {
    throw Error(ErrorKind::Contract, "the loop must start from a corpus of original sequences");
  }
  const auto t0 = Clock::now();
  state.model = fit_backbone(backbone_config(cfg.backbone, cfg.workers), state.frozen, train_seed(cfg.seed, 0));
  IterationReport report;
  report.k = 0;
  report.train_seconds = seconds_since(t0);
  fill_report(report, *state.model, state, cfg);
  return {std::move(state), std::move(report)};
}

IterationReport run_iteration(RsirState& state, const RsirConfig& cfg) {
  const int next = state.k + 1;
  IterationReport report;
  report.k = next;

  auto t0 = Clock::now();
  auto gen = generate_next(*state.model, state.corpus, state.frozen, cfg, next);
  report.gen_seconds = seconds_since(t0);
  report.generation = gen.stats;
  report.generation_empty = gen.sequences.empty();

  state.corpus = expand(state.corpus, gen.sequences);
  const auto view = training_view(state.frozen, state.corpus);

  t0 = Clock::now();
  const Model* warm = cfg.variant == Variant::FineTune ? state.model.get() : nullptr;
  state.model = fit_backbone(backbone_config(cfg.backbone, cfg.workers), view, train_seed(cfg.seed, next), warm);
  report.train_seconds = seconds_since(t0);
  state.k = next;

  fill_report(report, *state.model, state, cfg);
  return report;
}

std::vector<IterationReport> RsirRun::all() const {
  std::vector<IterationReport> out;
  out.push_back(base);
  out.insert(out.end(), iterations.begin(), iterations.end());
  return out;
}

RsirRun run_rsir(const RsirConfig& cfg, const Corpus& corpus) {
  auto [state, base] = start_rsir(cfg, corpus);
  RsirRun run;
  run.base = std::move(base);
  for (int k = 0; k < cfg.iterations; ++k) {
    try {
      run.iterations.push_back(run_iteration(state, cfg));
    } catch (const Error& e) {
      throw Error(e.kind(), "iteration " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  run.final_corpus = std::move(state.corpus);
  return run;
}

WeakToStrongReport weak_to_strong(const BackboneConfig& teacher, const BackboneConfig& student,
                                  const RsirConfig& cfg, const Corpus& corpus) {
  validate(cfg);
  validate(teacher);
  validate(student);
  WeakToStrongReport out;
  out.teacher = teacher.kind;
  out.student = student.kind;

  const auto frozen = split_leave_one_out(corpus);
  const auto teacher_model = fit_backbone(backbone_config(teacher, cfg.workers), frozen, train_seed(cfg.seed, 0));
  out.teacher_test = evaluate(*teacher_model, frozen, cfg.ks, EvalTarget::Test, cfg.workers);

  RsirConfig gen_cfg = cfg;
  if (teacher.kind != BackboneKind::SeqEmb) gen_cfg.backend.kind = BackendKind::Exact;
  auto gen = generate_next(*teacher_model, corpus, frozen, gen_cfg, 1);
  out.teacher_generation = gen.stats;
  const Corpus augmented = expand(corpus, gen.sequences);
  out.base_sequences = corpus.num_sequences();
  out.augmented_sequences = augmented.num_sequences();

  const auto base_model = teacher == student
                              ? teacher_model->clone()
                              : fit_backbone(backbone_config(student, cfg.workers), frozen, train_seed(cfg.seed, 0));
  out.student_base = evaluate(*base_model, frozen, cfg.ks, EvalTarget::Test, cfg.workers);
  const auto aug_view = training_view(frozen, augmented);
  const auto aug_model = fit_backbone(backbone_config(student, cfg.workers), aug_view, train_seed(cfg.seed, 1));
  out.student_augmented = evaluate(*aug_model, aug_view, cfg.ks, EvalTarget::Test, cfg.workers);

  for (const auto& b : out.student_base.at) {
    const auto& a = out.student_augmented.get(b.k);
    const std::string suffix = "@" + std::to_string(b.k);
    out.deltas.push_back({"ndcg" + suffix, b.ndcg, a.ndcg, a.ndcg - b.ndcg});
    out.deltas.push_back({"recall" + suffix, b.recall, a.recall, a.recall - b.recall});
    out.deltas.push_back({"mrr" + suffix, b.mrr, a.mrr, a.mrr - b.mrr});
  }
  return out;
}

}  // namespace rsir
