#include "gaitlab/kernels.hpp"

#include <algorithm>

namespace gaitlab::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_clamped(const double* x, const double* cap, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::min(x[i], cap[i]);
  return acc;
}

}  // namespace gaitlab::kernels::scalar
