#include "rsir/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rsir/error.hpp"
#include "rsir/markov.hpp"
#include "rsir/seq_emb.hpp"

namespace rsir {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'S', 'I', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kKindSeqEmb = 1;
constexpr std::uint32_t kKindMarkov = 2;

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::vector<char>& buffer() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(std::vector<char> buf, std::string path) : buf_(std::move(buf)), path_(std::move(path)) {}

  void need(std::size_t n, const char* what) {
    if (buf_.size() - pos_ < n) {
      throw Error(ErrorKind::Load, path_ + ": truncated checkpoint while reading " + what);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  void magic() {
    need(kMagic.size(), "magic");
    if (std::memcmp(buf_.data(), kMagic.data(), kMagic.size()) != 0) {
      throw Error(ErrorKind::Load, path_ + ": not a checkpoint (bad magic header)");
    }
    pos_ += kMagic.size();
  }
  void finish() {
    if (pos_ != buf_.size()) throw Error(ErrorKind::Load, path_ + ": trailing bytes after checkpoint payload");
  }
  const std::string& path() const { return path_; }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::string path_;
};

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open checkpoint " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::unique_ptr<Model> read_payload(Reader& r) {
  r.magic();
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::Load, r.path() + ": unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t kind = r.u32("kind");
  const std::uint64_t items = r.u64("item count");
  if (kind == kKindSeqEmb) {
    const std::uint64_t dim = r.u64("dim");
    const double gamma = r.f64("gamma");
    if (dim == 0 || items > (std::uint64_t{1} << 32)) throw Error(ErrorKind::Load, r.path() + ": bad shape");
    r.need(2 * items * dim * 8, "embedding tables");
    auto model = std::make_unique<SeqEmbModel>(items, dim, gamma);
    for (auto& v : model->input_embeddings()) v = r.f64("input table");
    for (auto& v : model->output_embeddings()) v = r.f64("output table");
    r.finish();
    return model;
  }
  if (kind == kKindMarkov) {
    const double alpha = r.f64("alpha");
    const std::uint64_t nnz = r.u64("nonzeros");
    r.need(nnz * 16, "transition counts");
    auto model = std::make_unique<MarkovModel>(items, alpha);
    for (std::uint64_t k = 0; k < nnz; ++k) {
      const auto from = r.u32("from");
      const auto to = r.u32("to");
      const auto c = r.u64("count");
      if (from >= items || to >= items) throw Error(ErrorKind::Load, r.path() + ": transition out of range");
      model->add_transition(from, to, c);
    }
    r.finish();
    return model;
  }
  throw Error(ErrorKind::Load, r.path() + ": unknown backbone kind " + std::to_string(kind));
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  Writer w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  if (const auto* emb = dynamic_cast<const SeqEmbModel*>(&model)) {
    w.u32(kKindSeqEmb);
    w.u64(emb->num_items());
    w.u64(emb->dim());
    w.f64(emb->gamma());
    for (double v : emb->input_embeddings()) w.f64(v);
    for (double v : emb->output_embeddings()) w.f64(v);
  } else if (const auto* mk = dynamic_cast<const MarkovModel*>(&model)) {
    w.u32(kKindMarkov);
    w.u64(mk->num_items());
    w.f64(mk->alpha());
    w.u64(mk->nonzeros());
    for (std::size_t from = 0; from < mk->rows().size(); ++from) {
      for (const auto& [to, c] : mk->rows()[from]) {
        w.u32(static_cast<std::uint32_t>(from));
        w.u32(to);
        w.u64(c);
      }
    }
  } else {
    throw Error(ErrorKind::Contract, "save_model: unsupported model type");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write checkpoint " + path);
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path);
}

std::unique_ptr<Model> load_model(const std::string& path) {
  Reader r(slurp(path), path);
  return read_payload(r);
}

SeqEmbModel load_seq_emb(const std::string& path) {
  auto model = load_model(path);
  if (model->kind() != BackboneKind::SeqEmb) {
    throw Error(ErrorKind::Load, path + ": checkpoint holds a " + backbone_name(model->kind()) +
                                     " model, expected seqemb");
  }
  return static_cast<const SeqEmbModel&>(*model);
}

MarkovModel load_markov(const std::string& path) {
  auto model = load_model(path);
  if (model->kind() != BackboneKind::Markov) {
    throw Error(ErrorKind::Load, path + ": checkpoint holds a " + backbone_name(model->kind()) +
                                     " model, expected markov");
  }
  return static_cast<const MarkovModel&>(*model);
}

}  // namespace rsir
