#include "rsir/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rsir/error.hpp"

namespace rsir {

Json to_json(const CorpusStats& s) {
  Json j;
  j["users"] = s.users;
  j["items"] = s.items;
  j["interactions"] = s.interactions;
  j["sequences"] = s.sequences;
  j["avg_length"] = s.avg_length;
  j["sparsity"] = s.sparsity;
  j["density"] = s.density;
  return j;
}

Json to_json(const MetricsReport& m) {
  Json j;
  j["evaluated_users"] = m.evaluated_users;
  for (const auto& at : m.at) {
    const std::string k = "@" + std::to_string(at.k);
    j["ndcg" + k] = at.ndcg;
    j["recall" + k] = at.recall;
    j["precision" + k] = at.precision;
    j["f1" + k] = at.f1;
    j["mrr" + k] = at.mrr;
  }
  return j;
}

Json to_json(const GenerationStats& g) {
  Json j;
  j["sources"] = g.sources;
  j["trials"] = g.trials;
  j["accepted_sequences"] = g.accepted_sequences;
  j["dedup_dropped"] = g.dedup_dropped;
  j["short_dropped"] = g.short_dropped;
  j["attempted_steps"] = g.attempted_steps;
  j["accepted_steps"] = g.accepted_steps;
  j["generated_interactions"] = g.generated_interactions;
  j["mean_effective_length"] = g.mean_effective_length;
  j["step_acceptance_rate"] = g.step_acceptance_rate;
  return j;
}

Json to_json(const IterationReport& r) {
  Json j;
  j["k"] = r.k;
  j["sequences"] = r.sequences;
  j["corpus"] = to_json(r.stats);
  j["generation"] = r.generation ? to_json(*r.generation) : Json(nullptr);
  j["generation_empty"] = r.generation_empty;
  j["apen_prime_mean"] = r.apen_prime_mean ? Json(*r.apen_prime_mean) : Json(nullptr);
  j["valid"] = r.valid.at.empty() ? Json(nullptr) : to_json(r.valid);
  j["test"] = to_json(r.test);
  j["train_seconds"] = r.train_seconds;
  j["gen_seconds"] = r.gen_seconds;
  return j;
}

Json to_json(const WeakToStrongReport& r) {
  Json j;
  j["teacher"] = backbone_name(r.teacher);
  j["student"] = backbone_name(r.student);
  j["teacher_test"] = to_json(r.teacher_test);
  j["teacher_generation"] = to_json(r.teacher_generation);
  j["base_sequences"] = r.base_sequences;
  j["augmented_sequences"] = r.augmented_sequences;
  j["student_base"] = to_json(r.student_base);
  j["student_augmented"] = to_json(r.student_augmented);
  Json deltas = Json::object();
  for (const auto& d : r.deltas) deltas[d.name] = d.delta;
  j["deltas"] = deltas;
  return j;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_stats(const CorpusStats& s) {
  std::ostringstream out;
  out << "users " << s.users << '\n'
      << "items " << s.items << '\n'
      << "interactions " << s.interactions << '\n'
      << "sequences " << s.sequences << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", s.avg_length);
  out << "avg_length " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", s.sparsity);
  out << "sparsity " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.6f", s.density);
  out << "density " << buf << '\n';
  return out.str();
}

std::string format_metrics(const MetricsReport& m) {
  std::ostringstream out;
  out << "evaluated_users " << m.evaluated_users << '\n';
  char buf[160];
  for (const auto& at : m.at) {
    std::snprintf(buf, sizeof(buf), "ndcg@%d %.4f  recall@%d %.4f  precision@%d %.4f  f1@%d %.4f  mrr@%d %.4f\n", at.k,
                  at.ndcg, at.k, at.recall, at.k, at.precision, at.k, at.f1, at.k, at.mrr);
    out << buf;
  }
  return out.str();
}

void write_trajectory_csv(std::ostream& out, std::span<const IterationReport> reports) {
  out << "k,N_k,density,apen_prime";
  if (!reports.empty()) {
    for (const auto& at : reports.front().test.at) out << ",ndcg@" << at.k << ",recall@" << at.k;
  }
  out << '\n';
  for (const auto& r : reports) {
    out << r.k << ',' << r.sequences << ',' << csv_number(r.stats.density) << ','
        << (r.apen_prime_mean ? csv_number(*r.apen_prime_mean) : std::string());
    for (const auto& at : r.test.at) out << ',' << csv_number(at.ndcg) << ',' << csv_number(at.recall);
    out << '\n';
  }
}

void write_timings_csv(std::ostream& out, std::span<const IterationReport> reports) {
  out << "k,train_seconds,gen_seconds\n";
  for (const auto& r : reports) {
    out << r.k << ',' << csv_number(r.train_seconds) << ',' << csv_number(r.gen_seconds) << '\n';
  }
}

void write_theory_csv(std::ostream& out, const theory::Simulation& sim) {
  out << "k,error\n";
  for (std::size_t k = 0; k < sim.series.size(); ++k) out << k << ',' << csv_number(sim.series[k]) << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "short write to " + path);
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace rsir
