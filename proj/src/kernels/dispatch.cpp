#include <atomic>
#include <stdexcept>
#include <string>

#include "delaysync/kernels.hpp"

namespace delaysync::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DELAYSYNC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa best = cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
  return best;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::kAvx2 && detected_isa() != Isa::kAvx2) {
    throw std::invalid_argument("AVX2/FMA kernels are not available on this CPU");
  }
  active().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size(), "dot");
#if defined(DELAYSYNC_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size(), "axpy");
#if defined(DELAYSYNC_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::axpy(alpha, x.data(), y.data(), x.size());
#endif
  scalar::axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::size_t rows, std::size_t cols, double alpha,
          std::span<const double> a, std::span<const double> x, double beta,
          std::span<double> y) {
  check_sizes(a.size(), rows * cols, "gemv");
  check_sizes(x.size(), cols, "gemv");
  check_sizes(y.size(), rows, "gemv");
#if defined(DELAYSYNC_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) {
    return avx2::gemv(rows, cols, alpha, a.data(), x.data(), beta, y.data());
  }
#endif
  scalar::gemv(rows, cols, alpha, a.data(), x.data(), beta, y.data());
}

}  // namespace delaysync::kernels
