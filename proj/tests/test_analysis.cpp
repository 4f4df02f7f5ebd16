#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rsir/analysis.hpp"
#include "rsir/error.hpp"
#include "rsir/loop.hpp"

using namespace rsir;

TEST_CASE("ApEn closed forms") {
  const ApEnConfig cfg;
  CHECK(apen(ItemList{0, 1, 2, 3, 4}, cfg) == doctest::Approx(std::log(3.0 / 4.0)).epsilon(1e-15));
  CHECK(std::log(3.0 / 4.0) == doctest::Approx(-0.287682).epsilon(1e-6));
  CHECK(apen(ItemList{7, 7, 7, 7, 7}, cfg) == 0.0);
  for (std::size_t n = 3; n <= 30; ++n) {
    for (int m = 1; m + 1 < int(n); ++m) {
      ItemList seq(n);
      std::iota(seq.begin(), seq.end(), 100);
      // ln((N - m) / (N - m + 1)) = ln(1 - 1 / (N - m + 1)), evaluated without cancellation.
      const double expected = std::log1p(-1.0 / double(n - m + 1));
      CHECK(apen(seq, {m, 0.0}) == expected);
      CHECK(std::fabs(expected - std::log(double(n - m) / double(n - m + 1))) < 1e-14);
    }
  }
  CHECK_THROWS_AS(apen(ItemList{1, 2}, cfg), Error);
}

TEST_CASE("ApEn prime") {
  const ApEnConfig cfg;
  CHECK(*apen_prime(ItemList{0, 1, 2, 3, 4}, cfg) == doctest::Approx(1.0 / std::log(0.75)));
  CHECK(*apen_prime(ItemList{0, 1, 2, 3, 4}, cfg) == doctest::Approx(-3.4761).epsilon(1e-4));
  CHECK_FALSE(apen_prime(ItemList{3, 3, 3, 3}, cfg).has_value());
}

TEST_CASE("ApEn matches the double-loop oracle and ignores relabeling") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t len = 3 + rng() % 10;
    const std::size_t alphabet = 1 + rng() % 5;
    ItemList s(len);
    for (auto& v : s) v = static_cast<ItemIndex>(rng() % alphabet);
    const int m = 1 + int(rng() % 2);
    if (len < std::size_t(m) + 1) continue;
    const double got = apen(s, {m, 0.0});
    CHECK(std::fabs(got - oracle::apen(s, m, 0.0)) < 1e-12);
    std::vector<ItemIndex> perm(alphabet);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ItemList relabeled = s;
    for (auto& v : relabeled) v = perm[v] * 13 + 2;
    CHECK(std::fabs(apen(relabeled, {m, 0.0}) - got) < 1e-12);
  }
  for (int t = 0; t < 300; ++t) {
    ItemList s(4 + rng() % 9);
    for (auto& v : s) v = static_cast<ItemIndex>(rng() % 6);
    const double r = double(rng() % 3);
    CHECK(std::fabs(apen(s, {2, r}) - oracle::apen(s, 2, r)) < 1e-12);
  }
}

TEST_CASE("dataset_information") {
  const ApEnConfig cfg;
  const std::vector<ItemList> one{{0, 1, 2, 3, 4}};
  const auto single = dataset_information(std::span<const ItemList>(one), cfg);
  CHECK(single.mean_apen_prime == *apen_prime(one[0], cfg));
  CHECK(single.qualifying == 1);

  std::vector<ItemList> mixed{{0, 1, 2, 3, 4}, {1, 2, 1, 2, 1, 3}, {5, 5, 5}, {1, 2}};
  const auto a = dataset_information(std::span<const ItemList>(mixed), cfg);
  CHECK(a.qualifying == 2);
  CHECK(a.zero_apen == 1);
  CHECK(a.too_short == 1);
  auto doubled = mixed;
  doubled.insert(doubled.end(), mixed.begin(), mixed.end());
  const auto b = dataset_information(std::span<const ItemList>(doubled), cfg, 3);
  CHECK(b.mean_apen_prime == doctest::Approx(a.mean_apen_prime).epsilon(1e-15));

  const std::vector<ItemList> none{{1, 1, 1}, {2}};
  CHECK_THROWS_AS(dataset_information(std::span<const ItemList>(none), cfg), Error);

  const auto corpus = Corpus::from_sequences(6, {{0, 1, 2, 3, 4}, {1, 2, 1, 2, 1, 3}});
  CHECK(dataset_information(corpus, cfg).mean_apen_prime == doctest::Approx(a.mean_apen_prime));
}

TEST_CASE("density_trajectory") {
  std::vector<IterationReport> reps(3);
  const double d[] = {0.1, 0.15, 0.15};
  for (int k = 0; k < 3; ++k) {
    reps[k].k = k;
    reps[k].stats.density = d[k];
  }
  const auto one = density_trajectory(std::span<const IterationReport>(reps.data(), 1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].relative_change == 0.0);
  const auto pts = density_trajectory(reps);
  REQUIRE(pts.size() == 3);
  CHECK(pts[1].k == 1);
  CHECK(pts[1].density == 0.15);
  CHECK(pts[1].relative_change == doctest::Approx(0.5));
  CHECK(pts[2].density >= pts[1].density);
}
