#pragma once

// Feasibility decisions for strict LMI problems.
//
// A problem is posed as minimizing t subject to
//   constraint(x) <= t I,   -P_k(x) <= t I for every positive-definite block,
//   ||x||_2 <= 1,
// and declared feasible iff the optimum satisfies t* <= -margin and the
// extracted witness passes an independent dense eigenvalue check. The norm
// ball removes the scale invariance of the homogeneous inequalities.

#include <optional>
#include <string>
#include <string_view>

#include "delaysync/lmi_builder.hpp"
#include "delaysync/sdp_solver.hpp"

namespace delaysync {

enum class Feasibility { kFeasible, kInfeasible, kInconclusive };

std::string_view to_string(Feasibility f);

struct FeasibilityOptions {
  sdp::Settings solver;
  /// Largest accepted condition number of blocks listed as invertible.
  double max_condition = 1e10;
};

struct FeasibilityResult {
  Feasibility verdict = Feasibility::kInconclusive;
  /// Present iff verdict is kFeasible.
  std::optional<LmiWitness> witness;
  /// Best t found (upper bound on t*).
  double t_upper = 0.0;
  /// Lower bound on t* from the primal iterate.
  double t_lower = 0.0;
  /// -max eigenvalue of the constraint at the witness (0 without witness).
  double slack = 0.0;
  sdp::Status solver_status = sdp::Status::kNumericalFailure;
  int iterations = 0;
  double runtime_seconds = 0.0;
  std::string detail;
};

struct WitnessCheck {
  bool ok = false;
  /// Largest eigenvalue of the constraint.
  double constraint_max_eig = 0.0;
  /// Smallest eigenvalue over positive-definite blocks (+inf if none).
  double block_min_eig = 0.0;
};

/// Independent check: constraint max eigenvalue < -margin/2 and every
/// positive-definite block has min eigenvalue >= margin/2.
WitnessCheck verify_witness(const LmiProblem& problem,
                            const std::vector<Eigen::MatrixXd>& blocks);

/// Condition number (2-norm) of a symmetric block; +inf if singular.
double condition_number(const Eigen::MatrixXd& block);

FeasibilityResult check_feasible(const LmiProblem& problem,
                                 const FeasibilityOptions& options = {});

}  // namespace delaysync
