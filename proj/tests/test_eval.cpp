#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rsir/error.hpp"
#include "rsir/eval.hpp"
#include "rsir/seq_emb.hpp"
#include "stubs.hpp"

using namespace rsir;

TEST_CASE("metrics_from_rank") {
  const auto r1 = metrics_from_rank(1, 10);
  CHECK(r1.ndcg == 1.0);
  CHECK(r1.recall == 1.0);
  CHECK(r1.precision == doctest::Approx(0.1));
  CHECK(r1.mrr == 1.0);
  const auto r3 = metrics_from_rank(3, 10);
  CHECK(r3.ndcg == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r3.mrr == doctest::Approx(1.0 / 3.0));
  const auto r11 = metrics_from_rank(11, 10);
  CHECK(r11.ndcg == 0.0);
  CHECK(r11.recall == 0.0);
  CHECK(r11.precision == 0.0);
  CHECK(r11.mrr == 0.0);
  const auto r10 = metrics_from_rank(10, 10);
  CHECK(r10.ndcg == doctest::Approx(1.0 / std::log2(11.0)));
}

TEST_CASE("F1 from mean precision and recall") {
  CHECK(std::round(f1_score(0.0080, 0.0795) * 1e4) / 1e4 == doctest::Approx(0.0145).epsilon(1e-12));
  CHECK(f1_score(0.0, 0.0) == 0.0);
  CHECK(f1_score(0.5, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("metrics_from_ranks averages over users") {
  const int ks[] = {10, 20};
  const std::size_t ranks[] = {1, 11};
  const auto rep = metrics_from_ranks(ranks, ks);
  CHECK(rep.evaluated_users == 2);
  CHECK(rep.get(10).recall == 0.5);
  CHECK(rep.get(10).ndcg == 0.5);
  CHECK(rep.get(10).precision == rep.get(10).recall / 10);
  CHECK(rep.get(20).recall == 1.0);
  CHECK(rep.get(20).ndcg == doctest::Approx(0.5 + 0.5 / std::log2(12.0)));
  CHECK_THROWS_AS(rep.get(5), Error);
  CHECK_THROWS_AS(metrics_from_ranks(std::span<const std::size_t>{}, ks), Error);

  const std::size_t ones[] = {1, 1, 1};
  const auto perfect = metrics_from_ranks(ones, ks);
  CHECK(perfect.get(10).ndcg == 1.0);
  CHECK(perfect.get(10).recall == 1.0);
  CHECK(perfect.get(10).mrr == 1.0);
  CHECK(perfect.get(10).precision == 0.1);
  CHECK(perfect.get(10).f1 == doctest::Approx(2 * 0.1 / 1.1));
}

TEST_CASE("improving one rank never lowers a metric") {
  std::mt19937_64 rng(3);
  const int ks[] = {5, 10};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> ranks(6);
    for (auto& r : ranks) r = 1 + rng() % 30;
    const auto before = metrics_from_ranks(ranks, ks);
    auto better = ranks;
    const auto u = rng() % ranks.size();
    better[u] = 1 + rng() % better[u];
    const auto after = metrics_from_ranks(better, ks);
    for (int k : ks) {
      CHECK(after.get(k).ndcg >= before.get(k).ndcg);
      CHECK(after.get(k).recall >= before.get(k).recall);
      CHECK(after.get(k).precision >= before.get(k).precision);
      CHECK(after.get(k).f1 >= before.get(k).f1);
      CHECK(after.get(k).mrr >= before.get(k).mrr);
    }
  }
}

TEST_CASE("rank_for_user with stub models") {
  const std::size_t n = 8;
  const auto view = split_leave_one_out(Corpus::from_sequences(n, {{0, 1, 2, 3}, {5, 6, 7}, {2, 3}}));
  const auto oracle_model = stub::next_item_model(n);
  for (const auto& u : view.users) {
    CHECK(rank_for_user(oracle_model, u, EvalTarget::Test) == 1);
    if (u.valid) CHECK(rank_for_user(oracle_model, u, EvalTarget::Validation) == 1);
  }
  // Target scored lowest: rank = n.
  const stub::FnModel anti(n, [](std::span<const ItemIndex> ctx, std::span<double> out) {
    for (auto& v : out) v = 0.0;
    out[(ctx.back() + 1) % out.size()] = -1.0;
  });
  for (const auto& u : view.users) CHECK(rank_for_user(anti, u, EvalTarget::Test) == n);
  // All tied: rank = target index + 1.
  const stub::FnModel flat(n, [](std::span<const ItemIndex>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  });
  CHECK(rank_for_user(flat, view.users[0], EvalTarget::Test) == 4);
  const int ks[] = {10};
  CHECK(rank_users(oracle_model, view, EvalTarget::Validation).size() == 2);
  CHECK(evaluate(oracle_model, view, ks).get(10).ndcg == 1.0);
}

TEST_CASE("evaluate matches a brute-force reimplementation") {
  std::mt19937_64 rng(12);
  const std::size_t n = 60;
  std::vector<ItemList> seqs(40);
  for (auto& s : seqs) {
    s.resize(2 + rng() % 10);
    for (auto& v : s) v = static_cast<ItemIndex>(rng() % n);
  }
  const auto view = split_leave_one_out(Corpus::from_sequences(n, seqs));
  const auto model = SeqEmbModel::initialized(n, 6, 0.9, 4);
  const int ks[] = {10, 20};
  for (std::size_t workers : {1u, 3u}) {
    const auto rep = evaluate(model, view, ks, EvalTarget::Test, workers);
    for (int k : ks) {
      double ndcg = 0.0, recall = 0.0;
      for (const auto& u : view.users) {
        auto ctx = u.train;
        if (u.valid) ctx.push_back(*u.valid);
        const auto scores = model.score_context(ctx);
        const auto r = oracle::full_sort_rank(scores, u.test);
        if (r <= std::size_t(k)) {
          ndcg += 1.0 / std::log2(double(r) + 1.0);
          recall += 1.0;
        }
      }
      ndcg /= double(view.users.size());
      recall /= double(view.users.size());
      CHECK(std::fabs(rep.get(k).ndcg - ndcg) < 1e-12);
      CHECK(std::fabs(rep.get(k).recall - recall) < 1e-12);
      CHECK(rep.get(k).precision == rep.get(k).recall / k);
    }
  }
}
