#include "rsir/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "rsir/error.hpp"
#include "rsir/rng.hpp"

namespace rsir {

std::uint32_t Vocabulary::intern(const std::string& id) {
  auto [it, inserted] = index_.try_emplace(id, static_cast<std::uint32_t>(ids_.size()));
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Corpus::Corpus(Vocabulary users, Vocabulary items)
    : users_(std::move(users)), items_(std::move(items)) {}

Corpus Corpus::from_sequences(std::size_t num_items, const std::vector<ItemList>& sequences) {
  Vocabulary users;
  Vocabulary items;
  for (std::size_t i = 0; i < num_items; ++i) items.intern("i" + std::to_string(i));
  for (std::size_t u = 0; u < sequences.size(); ++u) users.intern("u" + std::to_string(u));
  Corpus corpus(std::move(users), std::move(items));
  for (std::size_t u = 0; u < sequences.size(); ++u) {
    corpus.add({static_cast<UserIndex>(u), sequences[u], Origin::original()});
  }
  return corpus;
}

std::size_t Corpus::num_interactions() const {
  std::size_t total = 0;
  for (const auto& s : sequences_) total += s.items.size();
  return total;
}

bool Corpus::contains(UserIndex user, const ItemList& items) const {
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return false;
  for (std::size_t idx : it->second) {
    if (sequences_[idx].items == items) return true;
  }
  return false;
}

bool Corpus::add(InteractionSequence seq) {
  if (seq.user >= users_.size()) {
    throw Error(ErrorKind::Contract, "sequence references unknown user " + std::to_string(seq.user));
  }
  if (seq.items.empty()) throw Error(ErrorKind::Contract, "sequences must not be empty");
  for (ItemIndex item : seq.items) {
    if (item >= items_.size()) {
      throw Error(ErrorKind::Contract, "item index " + std::to_string(item) + " out of range");
    }
  }
  if (contains(seq.user, seq.items)) return false;
  by_user_[seq.user].push_back(sequences_.size());
  sequences_.push_back(std::move(seq));
  return true;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

std::vector<Interaction> parse_interactions(std::istream& in) {
  std::vector<Interaction> out;
  std::string line;
  std::size_t line_no = 0;
  char sep = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (is_blank(view)) continue;
    if (sep == 0) sep = view.find('\t') != std::string_view::npos ? '\t' : ',';
    const auto fields = split_fields(view, sep);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(line_no, "expected 2 or 3 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "empty user or item id");
    }
    Interaction rec{std::string(fields[0]), std::string(fields[1]), 0};
    if (fields.size() == 3) {
      const std::string_view ts = fields[2];
      const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), rec.timestamp);
      if (ec != std::errc() || ptr != ts.data() + ts.size() || ts.empty()) {
        throw ParseError(line_no, "malformed timestamp '" + std::string(ts) + "'");
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Interaction> read_interactions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open dataset " + path);
  return parse_interactions(in);
}

// ---------------------------------------------------------------------------
// Corpus construction

Corpus build_corpus(const std::vector<Interaction>& interactions, int min_core) {
  if (min_core < 1) throw Error(ErrorKind::Config, "min_core must be >= 1");

  // Provisional indices over the raw log, in first-appearance order.
  Vocabulary raw_users;
  Vocabulary raw_items;
  std::vector<std::uint32_t> rec_user(interactions.size());
  std::vector<std::uint32_t> rec_item(interactions.size());
  for (std::size_t r = 0; r < interactions.size(); ++r) {
    rec_user[r] = raw_users.intern(interactions[r].user_id);
    rec_item[r] = raw_items.intern(interactions[r].item_id);
  }

  // A sequence needs two items, so users are held to at least 2 even when
  // min_core is 1.
  const std::size_t user_core = static_cast<std::size_t>(std::max(min_core, 2));
  const std::size_t item_core = static_cast<std::size_t>(min_core);
  std::vector<char> alive(interactions.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> user_count(raw_users.size(), 0);
    std::vector<std::size_t> item_count(raw_items.size(), 0);
    for (std::size_t r = 0; r < interactions.size(); ++r) {
      if (!alive[r]) continue;
      ++user_count[rec_user[r]];
      ++item_count[rec_item[r]];
    }
    for (std::size_t r = 0; r < interactions.size(); ++r) {
      if (alive[r] && (user_count[rec_user[r]] < user_core || item_count[rec_item[r]] < item_core)) {
        alive[r] = 0;
        changed = true;
      }
    }
  }

  Vocabulary users;
  Vocabulary items;
  std::vector<std::vector<std::size_t>> records_by_user;
  for (std::size_t r = 0; r < interactions.size(); ++r) {
    if (!alive[r]) continue;
    const UserIndex u = users.intern(interactions[r].user_id);
    items.intern(interactions[r].item_id);
    if (u >= records_by_user.size()) records_by_user.resize(u + 1);
    records_by_user[u].push_back(r);
  }
  if (users.size() == 0) {
    throw Error(ErrorKind::EmptyCorpus, "no interactions survive " + std::to_string(min_core) +
                                            "-core filtering");
  }

  Corpus corpus(users, items);
  for (UserIndex u = 0; u < records_by_user.size(); ++u) {
    auto& recs = records_by_user[u];
    std::stable_sort(recs.begin(), recs.end(), [&](std::size_t a, std::size_t b) {
      return interactions[a].timestamp < interactions[b].timestamp;
    });
    ItemList seq;
    seq.reserve(recs.size());
    for (std::size_t r : recs) seq.push_back(*items.find(interactions[r].item_id));
    corpus.add({u, std::move(seq), Origin::original()});
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Splits

ItemList UserSplit::test_context() const {
  ItemList ctx = train;
  if (valid) ctx.push_back(*valid);
  return ctx;
}

std::vector<const ItemList*> SplitView::training_sequences() const {
  std::vector<const ItemList*> out;
  out.reserve(users.size() + extra_train.size());
  for (const auto& u : users) out.push_back(&u.train);
  for (const auto& s : extra_train) out.push_back(&s);
  return out;
}

bool SplitView::has_validation() const {
  return std::any_of(users.begin(), users.end(), [](const UserSplit& u) { return u.valid.has_value(); });
}

SplitView split_leave_one_out(const Corpus& corpus) {
  if (corpus.num_sequences() == 0) throw Error(ErrorKind::EmptyCorpus, "cannot split an empty corpus");
  SplitView view;
  view.num_items = corpus.num_items();
  for (const auto& seq : corpus.sequences()) {
    if (seq.origin.generated) {
      view.extra_train.push_back(seq.items);
      continue;
    }
    const auto& s = seq.items;
    const std::size_t n = s.size();
    if (n < 2) continue;  // nothing to hold out
    UserSplit split;
    split.user = seq.user;
    split.test = s[n - 1];
    if (n >= 3) {
      split.valid = s[n - 2];
      split.train.assign(s.begin(), s.end() - 2);
    } else {
      split.train.assign(s.begin(), s.end() - 1);
    }
    view.users.push_back(std::move(split));
  }
  return view;
}

SplitView training_view(const SplitView& frozen, const Corpus& corpus) {
  SplitView view;
  view.num_items = frozen.num_items;
  view.users = frozen.users;
  for (const auto& seq : corpus.sequences()) {
    if (seq.origin.generated) view.extra_train.push_back(seq.items);
  }
  return view;
}

// ---------------------------------------------------------------------------
// Noise, expansion, statistics

std::size_t ceil_count(double ratio, std::size_t n) {
  const double raw = ratio * static_cast<double>(n);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) <= 1e-9 * std::max(1.0, std::abs(raw))) {
    return static_cast<std::size_t>(rounded);
  }
  return static_cast<std::size_t>(std::ceil(raw));
}

Corpus inject_noise(const Corpus& corpus, const NoiseConfig& cfg) {
  if (!(cfg.eta >= 0.0 && cfg.eta <= 0.8)) {
    throw Error(ErrorKind::Config, "noise ratio eta must lie in [0, 0.8]");
  }
  if (corpus.num_sequences() == 0) throw Error(ErrorKind::EmptyCorpus, "cannot add noise to an empty corpus");
  Corpus out(corpus.users(), corpus.items());
  out.set_iteration_tag(corpus.iteration_tag());
  const std::size_t n_items = corpus.num_items();
  std::vector<std::size_t> ordinal(corpus.num_users(), 0);
  for (const auto& seq : corpus.sequences()) {
    InteractionSequence noisy = seq;
    if (!seq.origin.generated && cfg.eta > 0.0) {
      Rng rng = make_rng(cfg.seed, {seq.user, ordinal[seq.user]++});
      std::uniform_int_distribution<ItemIndex> pick_item(0, static_cast<ItemIndex>(n_items - 1));
      const std::size_t n = seq.items.size();
      // The held-out tail (validation and test targets) stays at the end.
      const std::size_t tail = n >= 3 ? 2 : 1;
      const std::size_t count = ceil_count(cfg.eta, n);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t body = noisy.items.size() - tail;
        std::uniform_int_distribution<std::size_t> pick_pos(0, body);
        const std::size_t pos = pick_pos(rng);
        noisy.items.insert(noisy.items.begin() + static_cast<std::ptrdiff_t>(pos), pick_item(rng));
      }
    }
    out.add(std::move(noisy));
  }
  return out;
}

Corpus expand(const Corpus& corpus, const std::vector<InteractionSequence>& generated) {
  Corpus out = corpus;
  for (const auto& seq : generated) out.add(seq);
  out.set_iteration_tag(corpus.iteration_tag() + 1);
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.num_sequences() == 0) throw Error(ErrorKind::EmptyCorpus, "no statistics for an empty corpus");
  CorpusStats s;
  s.users = corpus.num_users();
  s.items = corpus.num_items();
  s.interactions = corpus.num_interactions();
  s.sequences = corpus.num_sequences();
  s.avg_length = static_cast<double>(s.interactions) / static_cast<double>(s.sequences);
  s.density = static_cast<double>(s.interactions) /
              (static_cast<double>(s.users) * static_cast<double>(s.items));
  s.sparsity = 1.0 - s.density;
  return s;
}

void write_sequences(std::ostream& out, const Corpus& corpus,
                     const std::vector<InteractionSequence>& sequences) {
  for (const auto& seq : sequences) {
    const std::string& user = corpus.users().id(seq.user);
    for (std::size_t pos = 0; pos < seq.items.size(); ++pos) {
      out << user << '\t' << corpus.items().id(seq.items[pos]) << '\t' << pos;
      if (seq.origin.generated) out << "\tgen:" << seq.origin.iteration;
      out << '\n';
    }
  }
}

void write_interactions(std::ostream& out, const std::vector<Interaction>& log) {
  for (const auto& x : log) out << x.user_id << '\t' << x.item_id << '\t' << x.timestamp << '\n';
}

void write_interaction_log(std::ostream& out, const Corpus& corpus) {
  std::size_t ts = 0;
  for (const auto& seq : corpus.sequences()) {
    if (seq.origin.generated) continue;
    for (ItemIndex item : seq.items) {
      out << corpus.users().id(seq.user) << '\t' << corpus.items().id(item) << '\t' << ts++ << '\n';
    }
  }
}

}  // namespace rsir
