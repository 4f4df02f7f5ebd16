#include <atomic>
#include <cassert>
#include <string>

#include "rsir/error.hpp"
#include "rsir/simd/kernels.hpp"

namespace rsir::simd {

namespace {

std::atomic<int> g_active{-1};

const KernelTable& active_table() { return kernels(active_level()); }

}  // namespace

const char* level_name(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "unknown";
}

std::optional<Level> parse_level(std::string_view name) {
  if (name == "scalar") return Level::Scalar;
  if (name == "avx2") return Level::Avx2;
  if (name == "neon") return Level::Neon;
  return std::nullopt;
}

bool level_supported(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#ifdef RSIR_HAVE_AVX2
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Level::Neon:
#ifdef RSIR_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level detect_level() {
  if (level_supported(Level::Avx2)) return Level::Avx2;
  if (level_supported(Level::Neon)) return Level::Neon;
  return Level::Scalar;
}

Level active_level() {
  int cur = g_active.load(std::memory_order_relaxed);
  if (cur < 0) {
    cur = static_cast<int>(detect_level());
    int expected = -1;
    if (!g_active.compare_exchange_strong(expected, cur)) cur = expected;
  }
  return static_cast<Level>(cur);
}

void set_active_level(Level level) {
  if (!level_supported(level)) {
    throw Error(ErrorKind::Config,
                std::string("SIMD level not supported on this machine: ") + level_name(level));
  }
  g_active.store(static_cast<int>(level), std::memory_order_relaxed);
}

const KernelTable& kernels(Level level) {
  switch (level) {
#ifdef RSIR_HAVE_AVX2
    case Level::Avx2: return avx2::table;
#endif
#ifdef RSIR_HAVE_NEON
    case Level::Neon: return neon::table;
#endif
    default: return scalar::table;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_table().dot(a.data(), b.data(), a.size());
}

void matvec(std::span<const double> rows, std::size_t d, std::span<const double> x,
            std::span<double> out) {
  assert(x.size() == d && rows.size() == out.size() * d);
  active_table().matvec(rows.data(), out.size(), d, x.data(), out.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

double squared_l2(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_table().squared_l2(a.data(), b.data(), a.size());
}

}  // namespace rsir::simd
