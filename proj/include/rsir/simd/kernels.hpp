#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace rsir::simd {

enum class Level { Scalar, Avx2, Neon };

/// Raw kernel entry points for one instruction set. All pointers are to
/// dense double arrays; `rows` is row-major n x d.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*matvec)(const double* rows, std::size_t n, std::size_t d, const double* x, double* out);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
};

const char* level_name(Level level);
std::optional<Level> parse_level(std::string_view name);

/// True when the kernels were compiled in and the running CPU supports them.
bool level_supported(Level level);

/// Best supported level on this machine.
Level detect_level();

/// Level used by the free functions below. Defaults to detect_level().
Level active_level();

/// Throws rsir::Error(Config) when the level is not supported here.
void set_active_level(Level level);

const KernelTable& kernels(Level level);

double dot(std::span<const double> a, std::span<const double> b);

/// out[i] = rows[i, :] . x for every row.
void matvec(std::span<const double> rows, std::size_t d, std::span<const double> x,
            std::span<double> out);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double squared_l2(std::span<const double> a, std::span<const double> b);

namespace scalar {
extern const KernelTable table;
}
#ifdef RSIR_HAVE_AVX2
namespace avx2 {
extern const KernelTable table;
}
#endif
#ifdef RSIR_HAVE_NEON
namespace neon {
extern const KernelTable table;
}
#endif

}  // namespace rsir::simd
