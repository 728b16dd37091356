#pragma once

// Dense double-precision inner-loop kernels with a scalar reference
// implementation and an AVX2/FMA variant selected at runtime.
//
// The SDP interior-point solver (Schur complement assembly, affine matrix
// evaluation) and the delay-differential integrator (right-hand side and
// Runge-Kutta stage combinations) route their hot loops through here.

#include <cstddef>
#include <span>
#include <string_view>

namespace delaysync::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

/// Best instruction set supported by the running CPU (and compiled in).
Isa detected_isa();

/// Instruction set currently used by the dispatching entry points.
Isa active_isa();

/// Forces a variant. Throws std::invalid_argument if the CPU cannot run it.
void set_active_isa(Isa isa);

/// Sum of a[i] * b[i].
double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// y = alpha * A x + beta * y, A column-major with `rows` rows.
void gemv(std::size_t rows, std::size_t cols, double alpha,
          std::span<const double> a, std::span<const double> x, double beta,
          std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(std::size_t rows, std::size_t cols, double alpha, const double* a,
          const double* x, double beta, double* y);
}  // namespace scalar

#if defined(DELAYSYNC_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(std::size_t rows, std::size_t cols, double alpha, const double* a,
          const double* x, double beta, double* y);
}  // namespace avx2
#endif

}  // namespace delaysync::kernels
