#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rsir/error.hpp"
#include "rsir/generator.hpp"
#include "rsir/seq_emb.hpp"
#include "stubs.hpp"

using namespace rsir;

namespace {

SeqEmbModel random_model(std::size_t n, std::size_t d, std::uint64_t seed) {
  SeqEmbModel m(n, d, 0.8);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (auto& v : m.input_embeddings()) v = dist(rng);
  for (auto& v : m.output_embeddings()) v = dist(rng);
  return m;
}

Corpus random_corpus(std::size_t users, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ItemList> seqs(users);
  for (auto& s : seqs) {
    s.resize(3 + rng() % 8);
    for (auto& v : s) v = static_cast<ItemIndex>(rng() % n);
  }
  return Corpus::from_sequences(n, seqs);
}

}  // namespace

TEST_CASE("candidate pool") {
  const ItemList seq{4, 2, 4, 9};
  Rng rng(1);
  SUBCASE("p = 1 always exploits the distinct history") {
    for (int i = 0; i < 100; ++i) {
      const auto pool = build_candidate_pool(seq, 20, 1.0, 5, rng);
      CHECK(pool.source == PoolSource::Exploit);
      CHECK(pool.items == ItemList{4, 2, 9});
    }
  }
  SUBCASE("p = 0 always explores the full vocabulary") {
    std::set<ItemIndex> seen;
    for (int i = 0; i < 200; ++i) {
      const auto pool = build_candidate_pool(seq, 20, 0.0, 5, rng);
      CHECK(pool.source == PoolSource::Explore);
      CHECK(std::set<ItemIndex>(pool.items.begin(), pool.items.end()).size() == 5);
      seen.insert(pool.items.begin(), pool.items.end());
    }
    CHECK(seen.size() == 20);
    CHECK(build_candidate_pool(seq, 3, 0.0, 100, rng).items.size() == 3);
  }
  SUBCASE("p = 0.5 exploits half the time") {
    const int draws = 10000;
    int exploit = 0;
    for (int i = 0; i < draws; ++i) exploit += build_candidate_pool(seq, 20, 0.5, 5, rng).source == PoolSource::Exploit;
    const double sigma = std::sqrt(draws * 0.25);
    CHECK(std::fabs(exploit - draws * 0.5) <= 3 * sigma);
  }
  CHECK_THROWS_AS(build_candidate_pool(ItemList{}, 20, 0.5, 5, rng), Error);
}

TEST_CASE("sampling from the pool") {
  Rng rng(2);
  std::vector<double> scores{0.3, -1.0, 2.0, 0.0, 1.0, 5.0, -0.5};
  SUBCASE("a single-item pool always returns it") {
    const ItemList pool{3};
    for (int i = 0; i < 50; ++i) CHECK(sample_from_scores(scores, pool, 10, rng) == 3);
  }
  SUBCASE("a saturated item is sampled almost always") {
    std::vector<double> sat(7, -100.0);
    sat[4] = 100.0;
    const ItemList pool{0, 1, 2, 3, 4};
    for (int i = 0; i < 1000; ++i) CHECK(sample_from_scores(sat, pool, 5, rng) == 4);
  }
  SUBCASE("frequencies match the softmax of the top_k pool scores") {
    const ItemList pool{0, 1, 2, 3, 4, 6};
    // top_k = 5 drops item 1 (the lowest score).
    const ItemList kept{0, 2, 3, 4, 6};
    double z = 0.0;
    for (auto v : kept) z += std::exp(scores[v]);
    const int draws = 100000;
    std::map<ItemIndex, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[sample_from_scores(scores, pool, 5, rng)];
    CHECK(counts.count(1) == 0);
    CHECK(counts.count(5) == 0);
    for (auto v : kept) {
      const double p = std::exp(scores[v]) / z;
      const double sigma = std::sqrt(draws * p * (1 - p));
      CHECK(std::fabs(counts[v] - draws * p) <= 3 * sigma);
    }
  }
  SUBCASE("top_k keeps ties by the smaller index") {
    std::vector<double> tied(6, 1.0);
    const ItemList pool{5, 3, 1};
    for (int i = 0; i < 100; ++i) CHECK(sample_from_scores(tied, pool, 1, rng) == 1);
  }
}

TEST_CASE("always-accept and always-reject stubs") {
  // Item 0 always scores highest and sits in every prefix, so with top_k 1
  // the rollout never touches a held-out item.
  const stub::FnModel model(10, [](std::span<const ItemIndex>, std::span<double> out) {
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = -double(v);
  });
  const ItemList seq{0, 5, 6};
  GenerationConfig cfg;
  cfg.p = 1.0;
  cfg.top_k = 1;
  cfg.max_len = 12;
  Rng rng(3);
  const stub::ConstChecker yes(true);
  const stub::ConstChecker no(false);
  for (int i = 0; i < 20; ++i) {
    const auto t = generate_trajectory(model, seq, cfg, yes, rng);
    REQUIRE(t.items.has_value());
    CHECK(t.items->size() == cfg.max_len);
    CHECK(t.accepted_steps == cfg.max_len - t.prefix_len);
    CHECK(t.attempted_steps == t.accepted_steps);
    const auto r = generate_trajectory(model, seq, cfg, no, rng);
    CHECK_FALSE(r.items.has_value());
    CHECK(r.attempted_steps == 1);
    CHECK(r.accepted_steps == 0);
  }
}

TEST_CASE("generate_dataset counting with an always-accept stub") {
  const stub::FnModel flat(1000, [](std::span<const ItemIndex>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  });
  std::vector<ItemList> seqs;
  for (ItemIndex u = 0; u < 10; ++u) seqs.push_back({u, static_cast<ItemIndex>(u + 500)});
  const auto corpus = Corpus::from_sequences(1000, seqs);
  GenerationConfig cfg;
  cfg.trials = 2;
  cfg.p = 0.0;
  cfg.top_k = 100;
  cfg.max_len = 8;
  const stub::ConstChecker yes(true);
  const auto res = generate_dataset(flat, corpus, cfg, yes, 0);
  CHECK(res.sequences.size() == 20);
  CHECK(res.stats.trials == 20);
  CHECK(res.stats.accepted_sequences == 20);
  CHECK(res.stats.sources == 10);
  for (std::size_t i = 0; i < res.sequences.size(); ++i) {
    CHECK(res.sequences[i].user == i / 2);
    CHECK(res.sequences[i].origin == Origin::from_iteration(0));
  }
  cfg.trials = 0;
  CHECK(generate_dataset(flat, corpus, cfg, yes, 0).sequences.empty());
}

TEST_CASE("duplicates of existing and earlier generated sequences are dropped") {
  // Deterministic rollout: the argmax of the exploit pool is item 0.
  const stub::FnModel model(4, [](std::span<const ItemIndex>, std::span<double> out) {
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = -double(v);
  });
  const auto corpus = Corpus::from_sequences(4, {{0, 3}, {0, 0, 0}});
  GenerationConfig cfg;
  cfg.trials = 3;
  cfg.p = 1.0;
  cfg.top_k = 1;
  cfg.max_len = 3;
  const stub::ConstChecker yes(true);
  const auto res = generate_dataset(model, corpus, cfg, yes, 0);
  // User 0 yields (0,0,0) three times: one kept, two repeats. User 1's
  // source has no held-out items, so nothing is attempted.
  CHECK(res.sequences.size() == 1);
  CHECK(res.sequences[0].items == ItemList{0, 0, 0});
  CHECK(res.stats.dedup_dropped == 2);
  CHECK(res.stats.short_dropped == 3);
  // Same rollout for a user who already owns it: dropped.
  const auto owned = Corpus::from_sequences(4, {{0, 3}, {0, 0, 0}});
  auto again = expand(owned, {{0, {0, 0, 0}, Origin::from_iteration(0)}});
  CHECK(generate_dataset(model, again, cfg, yes, 1).sequences.empty());
}

TEST_CASE("every accepted step re-checks, and accepted length grows with tau") {
  const std::size_t n = 40;
  const auto model = random_model(n, 8, 11);
  const auto corpus = random_corpus(30, n, 12);
  ExactFidelity exact;
  GenerationConfig cfg;
  cfg.max_len = 20;
  for (std::size_t s = 0; s < corpus.num_sequences(); ++s) {
    const auto& seq = corpus.sequences()[s].items;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      std::size_t prev_accepted = 0;
      for (std::size_t tau : {1u, 3u, 5u, 10u, 20u, 40u}) {
        cfg.tau = tau;
        Rng rng = make_rng(7, {s, trial});
        const auto t = generate_trajectory(model, seq, cfg, exact, rng);
        CHECK(t.accepted_steps >= prev_accepted);
        prev_accepted = t.accepted_steps;
        CHECK(t.attempted_steps <= t.accepted_steps + 1);
        if (!t.items) continue;
        const auto& g = *t.items;
        CHECK(std::equal(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(t.prefix_len), g.begin()));
        ItemList targets;
        for (auto v : seq) {
          const bool in_prefix = std::find(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(t.prefix_len), v) !=
                                 seq.begin() + static_cast<std::ptrdiff_t>(t.prefix_len);
          if (!in_prefix && std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
        }
        for (std::size_t pos = t.prefix_len; pos < g.size(); ++pos) {
          const std::span<const ItemIndex> ctx(g.data(), pos + 1);
          CHECK(exact.accept(model, ctx, targets, tau));
          targets.erase(std::remove(targets.begin(), targets.end(), g[pos]), targets.end());
        }
      }
    }
  }
}

TEST_CASE("tau = |I| never breaks before the length cap or target exhaustion") {
  const std::size_t n = 30;
  const auto model = random_model(n, 6, 21);
  const auto corpus = random_corpus(20, n, 22);
  ExactFidelity exact;
  GenerationConfig cfg;
  cfg.tau = n;
  cfg.max_len = 15;
  Rng rng(9);
  for (const auto& s : corpus.sequences()) {
    const auto t = generate_trajectory(model, s.items, cfg, exact, rng);
    CHECK(t.attempted_steps == t.accepted_steps);
  }
}

TEST_CASE("per-step break probability 1/2 bounds the effective length by 2") {
  const stub::FnModel flat(500, [](std::span<const ItemIndex>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  });
  ItemList seq;
  for (ItemIndex v = 0; v < 40; ++v) seq.push_back(v * 7 % 500);
  GenerationConfig cfg;
  cfg.max_len = 200;
  cfg.p = 0.0;
  cfg.top_k = 50;
  const stub::CoinChecker coin(77);
  const int trials = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = make_rng(5, {static_cast<std::uint64_t>(i)});
    const double len = double(generate_trajectory(flat, seq, cfg, coin, rng).attempted_steps);
    sum += len;
    sq += len * len;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt(sq / trials - mean * mean);
  CHECK(mean <= 2.0 + 3.0 * sd / std::sqrt(double(trials)));
  CHECK(mean > 1.5);
}

TEST_CASE("generate_dataset is identical across worker counts") {
  const std::size_t n = 30;
  const auto model = random_model(n, 6, 31);
  const auto corpus = random_corpus(40, n, 32);
  ExactFidelity exact;
  GenerationConfig cfg;
  cfg.tau = 10;
  cfg.seed = 5;
  const auto holdout = split_leave_one_out(corpus);
  cfg.workers = 1;
  const auto a = generate_dataset(model, corpus, cfg, exact, 2, &holdout);
  cfg.workers = 4;
  const auto b = generate_dataset(model, corpus, cfg, exact, 2, &holdout);
  REQUIRE(a.sequences.size() == b.sequences.size());
  CHECK(a.sequences.size() > 0);
  for (std::size_t i = 0; i < a.sequences.size(); ++i) {
    CHECK(a.sequences[i].user == b.sequences[i].user);
    CHECK(a.sequences[i].items == b.sequences[i].items);
  }
  CHECK(a.stats.attempted_steps == b.stats.attempted_steps);
  CHECK(a.stats.accepted_sequences <= a.stats.trials);
  CHECK(a.stats.mean_effective_length <= double(cfg.max_len));
  for (const auto& s : a.sequences) {
    CHECK(s.items.size() >= cfg.min_len);
    CHECK_FALSE(corpus.contains(s.user, s.items));
  }
}

TEST_CASE("generation sources are the training prefixes of originals") {
  const auto corpus = Corpus::from_sequences(10, {{0, 1, 2, 3, 4}, {5, 6}, {7}});
  const auto holdout = split_leave_one_out(corpus);
  const auto d = expand(corpus, {{1, {9, 8, 7}, Origin::from_iteration(0)}});
  const auto src = generation_sources(d, &holdout);
  REQUIRE(src.size() == 1);
  CHECK(src[0].items == ItemList{0, 1, 2});
  const auto full = generation_sources(d, nullptr);
  REQUIRE(full.size() == 2);
  CHECK(full[1].items == ItemList{5, 6});
}

TEST_CASE("heuristic baselines") {
  const auto corpus = Corpus::from_sequences(12, {{0, 1, 2, 3}, {4, 5, 6, 7, 8, 9, 10}, {11, 0}});
  SUBCASE("insertion adds ceil(r n) items per copy") {
    const auto d = baseline_insert(corpus, 0.5, 3);
    CHECK(d.num_sequences() == 6);
    std::map<UserIndex, std::size_t> orig_len;
    for (const auto& s : d.sequences()) {
      if (!s.origin.generated) orig_len[s.user] = s.items.size();
    }
    for (const auto& s : d.sequences()) {
      if (s.origin.generated) CHECK(s.items.size() == orig_len[s.user] + ceil_count(0.5, orig_len[s.user]));
    }
    CHECK(d.iteration_tag() == 1);
  }
  SUBCASE("reordering preserves the multiset") {
    const auto d = baseline_reorder(corpus, 3, 4);
    for (const auto& s : d.sequences()) {
      if (!s.origin.generated) continue;
      auto a = s.items;
      auto b = corpus.sequences()[s.user].items;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
  SUBCASE("max_added caps the added volume at the first sequence past it") {
    const auto d = baseline_insert(corpus, 1.0, 5, nullptr, 5);
    std::size_t added = 0;
    for (const auto& s : d.sequences()) added += s.origin.generated ? s.items.size() : 0;
    CHECK(added >= 5);
    CHECK(d.num_sequences() < 6);
  }
  SUBCASE("max_added beyond one pass runs further passes") {
    const auto d = baseline_insert(corpus, 0.5, 6, nullptr, 60);
    std::size_t added = 0;
    for (const auto& s : d.sequences()) added += s.origin.generated ? s.items.size() : 0;
    CHECK(added >= 60);
    CHECK(d.num_sequences() > 6);
  }
  SUBCASE("passes stop once nothing new can be added") {
    // Reordering a repeated item reproduces the original, so no pass adds anything.
    const auto small = Corpus::from_sequences(3, {{0, 0}, {1, 1, 1}});
    const auto d = baseline_reorder(small, 2, 1, nullptr, 1000);
    CHECK(d.num_sequences() == 2);
  }
  SUBCASE("deterministic per seed") {
    const auto a = baseline_insert(corpus, 0.5, 8);
    const auto b = baseline_insert(corpus, 0.5, 8);
    for (std::size_t i = 0; i < a.num_sequences(); ++i) CHECK(a.sequences()[i].items == b.sequences()[i].items);
  }
  CHECK_THROWS_AS(baseline_insert(corpus, 0.0, 1), Error);
  CHECK_THROWS_AS(baseline_insert(corpus, 1.5, 1), Error);
  CHECK_THROWS_AS(baseline_reorder(corpus, 1, 1), Error);
}
