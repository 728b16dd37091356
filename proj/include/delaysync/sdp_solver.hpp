#pragma once

// Dense primal-dual interior-point solver for small block-diagonal
// semidefinite programs in linear-matrix-inequality form:
//
//   minimize c'y  subject to  S_b(y) = C_b + sum_i y_i G_{b,i} >= 0  for all b.
//
// Internally this is the dual of the standard-form primal
//   minimize <C, X>  s.t.  <-G_i, X> = -c_i,  X >= 0,
// solved with the HKM search direction and a Mehrotra predictor-corrector.

#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace delaysync::sdp {

struct LmiBlock {
  Eigen::MatrixXd constant;
  /// (variable index, symmetric coefficient). Variables absent from a block
  /// have a zero coefficient there.
  std::vector<std::pair<int, Eigen::MatrixXd>> terms;
};

struct LmiForm {
  std::vector<LmiBlock> blocks;
  Eigen::VectorXd cost;

  int num_variables() const { return static_cast<int>(cost.size()); }
  /// Throws std::invalid_argument on non-square or mismatched blocks,
  /// out-of-range variable indices or non-finite data.
  void validate() const;
  /// Block values S_b(y).
  std::vector<Eigen::MatrixXd> evaluate(const Eigen::VectorXd& y) const;
};

struct Settings {
  int max_iterations = 100;
  /// Relative duality gap and relative residual tolerance.
  double tolerance = 1e-9;
  /// Largest fraction of the distance to the cone boundary taken per step.
  double max_step_fraction = 0.98;
};

enum class Status { kOptimal, kIterationLimit, kNumericalFailure };

std::string_view to_string(Status status);

struct Result {
  Status status = Status::kNumericalFailure;
  Eigen::VectorXd y;
  /// c'y at the returned point.
  double objective = 0.0;
  /// Lower bound on the optimum from the primal iterate (valid when the
  /// primal residual is small).
  double lower_bound = 0.0;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

Result solve(const LmiForm& problem, const Settings& settings = {});

}  // namespace delaysync::sdp
