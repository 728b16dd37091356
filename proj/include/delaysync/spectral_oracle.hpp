#pragma once

// Characteristic roots of x'(t) = A x(t) + sigma A_d x(t - tau) by Chebyshev
// collocation of the infinitesimal generator of the solution semigroup on
// [-tau, 0], and the exact delay margin obtained from them.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/geometry.hpp"
#include "delaysync/lmi_builder.hpp"

namespace delaysync {

struct SpectralResult {
  Complex rightmost_root;
  /// Approximate roots, sorted by decreasing real part.
  std::vector<Complex> roots;
  int discretization_order = 0;
};

/// Fixed-order discretization. tau = 0 gives the eigenvalues of A + sigma A_d.
/// Throws std::invalid_argument for tau < 0, order < 8 or bad dimensions, and
/// std::runtime_error if the eigensolver fails.
SpectralResult rightmost_root(const AgentModel& model, const Eigen::MatrixXd& Ad, Complex sigma,
                              double tau, int order = 20);

/// Doubles the order from `order` until the rightmost root moves by less than
/// `stable_tol` (order capped at max_order).
SpectralResult rightmost_root_adaptive(const AgentModel& model, const Eigen::MatrixXd& Ad,
                                       Complex sigma, double tau, int order = 20,
                                       double stable_tol = 1e-8, int max_order = 160);

struct MarginOptions {
  int order = 20;
  /// Scan step used to bracket the first crossing.
  double scan_step = 0.05;
  /// Delays beyond this are reported as unbounded.
  double tau_cap = 10.0;
  int jobs = 0;
};

struct DelayMargin {
  /// Minimum over sigmas; tau_cap when unbounded.
  double margin = 0.0;
  /// No crossing up to tau_cap for any sigma (delay-independent at this range).
  bool unbounded = false;
  std::vector<double> per_sigma;
  std::vector<char> per_sigma_unbounded;
};

/// For each sigma, the first tau at which the rightmost root reaches the
/// imaginary axis, bisected to width tol. Unstable at tau = 0 gives 0.
DelayMargin true_delay_margin(const AgentModel& model, const Eigen::MatrixXd& Ad,
                              std::span<const Complex> sigmas, double tol,
                              const MarginOptions& options = {});

}  // namespace delaysync
