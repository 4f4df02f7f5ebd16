#include "rsir/simd/kernels.hpp"

namespace rsir::simd::scalar {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec(const double* rows, std::size_t n, std::size_t d, const double* x, double* out) {
  for (std::size_t r = 0; r < n; ++r) out[r] = dot(rows + r * d, x, d);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

const KernelTable table{&dot, &matvec, &axpy, &squared_l2};

}  // namespace rsir::simd::scalar
