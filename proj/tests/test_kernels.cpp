#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "rsir/error.hpp"
#include "rsir/simd/kernels.hpp"

using namespace rsir;

namespace {

std::vector<simd::Level> supported_levels() {
  std::vector<simd::Level> out;
  for (auto l : {simd::Level::Scalar, simd::Level::Avx2, simd::Level::Neon}) {
    if (simd::level_supported(l)) out.push_back(l);
  }
  return out;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar level is always available and names round-trip") {
  CHECK(simd::level_supported(simd::Level::Scalar));
  for (auto l : {simd::Level::Scalar, simd::Level::Avx2, simd::Level::Neon}) {
    CHECK(simd::parse_level(simd::level_name(l)) == l);
  }
  CHECK_FALSE(simd::parse_level("sse9").has_value());
  CHECK(simd::level_supported(simd::detect_level()));
}

TEST_CASE("every compiled kernel set agrees with the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = simd::kernels(simd::Level::Scalar);
  for (auto level : supported_levels()) {
    CAPTURE(simd::level_name(level));
    const auto& k = simd::kernels(level);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = random_vec(n, rng);
      const auto b = random_vec(n, rng);
      const double exact = oracle::naive_dot(a.data(), b.data(), n);
      CHECK(k.dot(a.data(), b.data(), n) == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
      CHECK(k.squared_l2(a.data(), b.data(), n) ==
            doctest::Approx(ref.squared_l2(a.data(), b.data(), n)).epsilon(1e-12).scale(1.0));

      auto y1 = b;
      auto y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      k.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14).scale(1.0));
    }
    for (std::size_t d : {1u, 3u, 4u, 8u, 13u, 32u}) {
      const std::size_t rows = 29;
      const auto m = random_vec(rows * d, rng);
      const auto x = random_vec(d, rng);
      std::vector<double> out(rows);
      k.matvec(m.data(), rows, d, x.data(), out.data());
      for (std::size_t r = 0; r < rows; ++r) {
        CHECK(out[r] == doctest::Approx(oracle::naive_dot(m.data() + r * d, x.data(), d)).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("active level can be switched and unsupported levels are refused") {
  const auto before = simd::active_level();
  simd::set_active_level(simd::Level::Scalar);
  CHECK(simd::active_level() == simd::Level::Scalar);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(simd::dot(a, b) == 32.0);
  for (auto l : {simd::Level::Avx2, simd::Level::Neon}) {
    if (!simd::level_supported(l)) CHECK_THROWS_AS(simd::set_active_level(l), Error);
  }
  simd::set_active_level(before);
}
