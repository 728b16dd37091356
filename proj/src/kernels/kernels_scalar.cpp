#include "delaysync/kernels.hpp"

namespace delaysync::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(std::size_t rows, std::size_t cols, double alpha, const double* a,
          const double* x, double beta, double* y) {
  if (beta == 0.0) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  } else if (beta != 1.0) {
    for (std::size_t i = 0; i < rows; ++i) y[i] *= beta;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    const double s = alpha * x[j];
    if (s == 0.0) continue;
    const double* col = a + j * rows;
    for (std::size_t i = 0; i < rows; ++i) y[i] += s * col[i];
  }
}

}  // namespace delaysync::kernels::scalar
