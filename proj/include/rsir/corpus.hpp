#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rsir/types.hpp"

namespace rsir {

struct Interaction {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;
};

/// Where a sequence came from. Generated sequences remember the iteration
/// whose model produced them.
struct Origin {
  bool generated = false;
  int iteration = 0;

  static Origin original() { return {}; }
  static Origin from_iteration(int k) { return {true, k}; }

  friend bool operator==(const Origin&, const Origin&) = default;
};

struct InteractionSequence {
  UserIndex user = 0;
  ItemList items;
  Origin origin;
};

/// Dense id <-> index map for users or items.
class Vocabulary {
 public:
  std::uint32_t intern(const std::string& id);
  std::optional<std::uint32_t> find(const std::string& id) const;
  const std::string& id(std::uint32_t index) const { return ids_.at(index); }
  std::size_t size() const { return ids_.size(); }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// The dataset D_k: vocabularies plus every sequence, original or generated.
/// No two sequences share the same (user, items) pair.
class Corpus {
 public:
  Corpus() = default;
  Corpus(Vocabulary users, Vocabulary items);

  /// Test/tool helper: users "u<k>" and items "i<k>" with one original
  /// sequence per entry of `sequences`.
  static Corpus from_sequences(std::size_t num_items, const std::vector<ItemList>& sequences);

  const Vocabulary& users() const { return users_; }
  const Vocabulary& items() const { return items_; }
  std::size_t num_users() const { return users_.size(); }
  std::size_t num_items() const { return items_.size(); }

  const std::vector<InteractionSequence>& sequences() const { return sequences_; }
  std::size_t num_sequences() const { return sequences_.size(); }
  std::size_t num_interactions() const;

  int iteration_tag() const { return iteration_tag_; }
  void set_iteration_tag(int k) { iteration_tag_ = k; }

  bool contains(UserIndex user, const ItemList& items) const;

  /// Appends unless the same user already owns an identical item list.
  /// Returns whether the sequence was added. Throws on an invalid sequence.
  bool add(InteractionSequence seq);

 private:
  Vocabulary users_;
  Vocabulary items_;
  std::vector<InteractionSequence> sequences_;
  std::unordered_map<UserIndex, std::vector<std::size_t>> by_user_;
  int iteration_tag_ = 0;
};

/// Leave-one-out split of the original sequences. Generated sequences are
/// carried as extra training sequences and never supply targets.
struct UserSplit {
  UserIndex user = 0;
  ItemList train;
  std::optional<ItemIndex> valid;
  ItemIndex test = 0;

  /// Everything before the test target: train prefix plus validation item.
  ItemList test_context() const;
};

struct SplitView {
  std::size_t num_items = 0;
  std::vector<UserSplit> users;
  std::vector<ItemList> extra_train;

  /// Every sequence the model is fitted on: train prefixes then extras.
  std::vector<const ItemList*> training_sequences() const;
  bool has_validation() const;
};

struct CorpusStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  std::size_t sequences = 0;
  double avg_length = 0.0;
  double sparsity = 0.0;
  double density = 0.0;
};

struct NoiseConfig {
  double eta = 0.0;
  std::uint64_t seed = 0;
};

/// Reads "user<sep>item[<sep>timestamp]" lines; sep is tab or comma, chosen
/// from the first non-blank line. Blank lines are skipped.
std::vector<Interaction> parse_interactions(std::istream& in);
std::vector<Interaction> read_interactions_file(const std::string& path);

/// Iterative k-core filter, chronological ordering, dense indexing.
Corpus build_corpus(const std::vector<Interaction>& interactions, int min_core = 5);

SplitView split_leave_one_out(const Corpus& corpus);

/// Builds the training view for `corpus` while reusing the frozen targets of
/// `frozen` (computed once from D_0).
SplitView training_view(const SplitView& frozen, const Corpus& corpus);

Corpus inject_noise(const Corpus& corpus, const NoiseConfig& cfg);

/// D_{k+1} = D_k plus every generated sequence that is not an exact
/// same-user duplicate. Increments the iteration tag.
Corpus expand(const Corpus& corpus, const std::vector<InteractionSequence>& generated);

CorpusStats corpus_stats(const Corpus& corpus);

/// ceil(ratio * n) that is robust to representation error in ratio * n.
std::size_t ceil_count(double ratio, std::size_t n);

/// Writes sequences as interaction-log lines. Generated sequences get an
/// extra "gen:<k>" column and the position within the sequence as timestamp.
void write_sequences(std::ostream& out, const Corpus& corpus,
                     const std::vector<InteractionSequence>& sequences);

/// Writes "user<TAB>item<TAB>timestamp" lines in the given order.
void write_interactions(std::ostream& out, const std::vector<Interaction>& log);

/// Writes the original sequences back as a plain interaction log.
void write_interaction_log(std::ostream& out, const Corpus& corpus);

}  // namespace rsir
