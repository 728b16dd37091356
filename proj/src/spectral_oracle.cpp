#include "delaysync/spectral_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "delaysync/parallel.hpp"

namespace delaysync {

namespace {

// Chebyshev differentiation matrix on x_k = cos(k pi / N), k = 0..N.
Eigen::MatrixXd cheb_matrix(int N) {
  Eigen::VectorXd x(N + 1), c(N + 1);
  for (int k = 0; k <= N; ++k) {
    x(k) = std::cos(std::numbers::pi * k / N);
    c(k) = ((k == 0 || k == N) ? 2.0 : 1.0) * ((k % 2 == 0) ? 1.0 : -1.0);
  }
  Eigen::MatrixXd D(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      D(i, j) = (i == j) ? 0.0 : (c(i) / c(j)) / (x(i) - x(j));
    }
  }
  for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

SpectralResult from_eigenvalues(const Eigen::VectorXcd& ev, int order) {
  SpectralResult out;
  out.discretization_order = order;
  out.roots.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.roots.begin(), out.roots.end(), [](Complex a, Complex b) {
    return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag());
  });
  out.rightmost_root = out.roots.front();
  return out;
}

}  // namespace

SpectralResult rightmost_root(const AgentModel& model, const Eigen::MatrixXd& Ad, Complex sigma,
                              double tau, int order) {
  const int n = model.n();
  if (Ad.rows() != n || Ad.cols() != n) throw std::invalid_argument("rightmost_root: A_d must be n x n");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("rightmost_root: tau must be >= 0");
  if (order < 8) throw std::invalid_argument("rightmost_root: order must be >= 8");

  const Eigen::MatrixXcd A = model.A.cast<Complex>();
  const Eigen::MatrixXcd Bd = sigma * Ad.cast<Complex>();
  if (tau == 0.0) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A + Bd, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("rightmost_root: eigensolver failed");
    return from_eigenvalues(es.eigenvalues(), order);
  }

  // State u(theta) on theta = tau (x - 1) / 2; node 0 is theta = 0 and node
  // `order` is theta = -tau. Row block 0 carries the dynamics.
  const int N = order;
  const Eigen::MatrixXd D = cheb_matrix(N) * (2.0 / tau);
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero((N + 1) * n, (N + 1) * n);
  G.block(0, 0, n, n) = A;
  G.block(0, N * n, n, n) += Bd;
  for (int i = 1; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      if (D(i, j) == 0.0) continue;
      for (int r = 0; r < n; ++r) G(i * n + r, j * n + r) = D(i, j);
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(G, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("rightmost_root: eigensolver failed");
  return from_eigenvalues(es.eigenvalues(), order);
}

SpectralResult rightmost_root_adaptive(const AgentModel& model, const Eigen::MatrixXd& Ad,
                                       Complex sigma, double tau, int order, double stable_tol,
                                       int max_order) {
  SpectralResult prev = rightmost_root(model, Ad, sigma, tau, order);
  if (tau == 0.0) return prev;
  while (2 * prev.discretization_order <= max_order) {
    SpectralResult next = rightmost_root(model, Ad, sigma, tau, 2 * prev.discretization_order);
    const bool settled = std::abs(next.rightmost_root.real() - prev.rightmost_root.real()) < stable_tol;
    prev = std::move(next);
    if (settled) break;
  }
  return prev;
}

DelayMargin true_delay_margin(const AgentModel& model, const Eigen::MatrixXd& Ad,
                              std::span<const Complex> sigmas, double tol,
                              const MarginOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("true_delay_margin: tol must be positive");
  if (sigmas.empty()) throw std::invalid_argument("true_delay_margin: no sigmas");
  if (!(options.scan_step > 0.0 && options.tau_cap > 0.0)) {
    throw std::invalid_argument("true_delay_margin: invalid scan settings");
  }
  DelayMargin out;
  out.per_sigma.assign(sigmas.size(), 0.0);
  out.per_sigma_unbounded.assign(sigmas.size(), 0);

  parallel_for(sigmas.size(), options.jobs, [&](std::size_t k) {
    const Complex s = sigmas[k];
    auto stable = [&](double tau) {
      return rightmost_root_adaptive(model, Ad, s, tau, options.order).rightmost_root.real() < 0.0;
    };
    if (!stable(0.0)) {
      out.per_sigma[k] = 0.0;
      return;
    }
    if ((s * Ad.cast<Complex>()).cwiseAbs().maxCoeff() == 0.0) {
      out.per_sigma[k] = options.tau_cap;
      out.per_sigma_unbounded[k] = 1;
      return;
    }
    double lo = 0.0;
    double hi = -1.0;
    for (double tau = options.scan_step; tau <= options.tau_cap + 1e-12; tau += options.scan_step) {
      if (!stable(tau)) {
        hi = tau;
        break;
      }
      lo = tau;
    }
    if (hi < 0.0) {
      out.per_sigma[k] = options.tau_cap;
      out.per_sigma_unbounded[k] = 1;
      return;
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (stable(mid) ? lo : hi) = mid;
    }
    out.per_sigma[k] = 0.5 * (lo + hi);
  });

  out.margin = *std::min_element(out.per_sigma.begin(), out.per_sigma.end());
  out.unbounded = std::all_of(out.per_sigma_unbounded.begin(), out.per_sigma_unbounded.end(),
                              [](char u) { return u != 0; });
  return out;
}

}  // namespace delaysync
