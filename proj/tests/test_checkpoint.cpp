#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "rsir/checkpoint.hpp"
#include "rsir/error.hpp"
#include "rsir/markov.hpp"
#include "rsir/seq_emb.hpp"

using namespace rsir;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("rsir_ckpt_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_bytes(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::string& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

ErrorKind load_error_kind(const std::string& p) {
  try {
    load_model(p);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Contract;
}

}  // namespace

TEST_CASE("seqemb checkpoint round-trips bit-exactly") {
  TempDir dir;
  const auto m = SeqEmbModel::initialized(17, 5, 0.65, 3);
  save_model(m, dir.file("m.bin"));
  const auto back = load_seq_emb(dir.file("m.bin"));
  CHECK(back.num_items() == 17);
  CHECK(back.dim() == 5);
  CHECK(back.gamma() == 0.65);
  CHECK(back.input_embeddings() == m.input_embeddings());
  CHECK(back.output_embeddings() == m.output_embeddings());
  const ItemIndex ctx[] = {3, 9, 1};
  CHECK(back.score_context(ctx) == m.score_context(ctx));

  const auto bytes = read_bytes(dir.file("m.bin"));
  CHECK(bytes.substr(0, 8) == "RSIRCKPT");
  CHECK(bytes.size() == 8 + 4 + 4 + 8 + 8 + 8 + 2 * 17 * 5 * 8);
}

TEST_CASE("markov checkpoint round-trips") {
  TempDir dir;
  MarkovModel m(6, 0.25);
  m.add_transition(0, 1, 3);
  m.add_transition(5, 2);
  m.add_transition(0, 4);
  save_model(m, dir.file("k.bin"));
  const auto back = load_markov(dir.file("k.bin"));
  CHECK(back.alpha() == 0.25);
  CHECK(back.rows() == m.rows());
  CHECK(back.row_total(0) == 4);
  const auto any = load_model(dir.file("k.bin"));
  CHECK(any->kind() == BackboneKind::Markov);
}

TEST_CASE("corrupt checkpoints are load errors") {
  TempDir dir;
  const auto m = SeqEmbModel::initialized(4, 2, 0.8, 1);
  save_model(m, dir.file("m.bin"));
  const auto good = read_bytes(dir.file("m.bin"));

  auto bad = good;
  bad[0] = 'X';
  write_bytes(dir.file("magic.bin"), bad);
  CHECK(load_error_kind(dir.file("magic.bin")) == ErrorKind::Load);

  bad = good;
  bad[8] = 9;
  write_bytes(dir.file("version.bin"), bad);
  CHECK(load_error_kind(dir.file("version.bin")) == ErrorKind::Load);

  write_bytes(dir.file("short.bin"), good.substr(0, good.size() - 3));
  CHECK(load_error_kind(dir.file("short.bin")) == ErrorKind::Load);

  write_bytes(dir.file("long.bin"), good + "x");
  CHECK(load_error_kind(dir.file("long.bin")) == ErrorKind::Load);

  CHECK_THROWS_AS(load_markov(dir.file("m.bin")), Error);
  CHECK_THROWS_AS(load_model(dir.file("missing.bin")), Error);
}
