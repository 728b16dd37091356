#pragma once

// Construction of the delay-dependent matrix inequalities as real symmetric
// affine matrix functions of named decision blocks.
//
// Every builder first forms the complex Hermitian block matrix in terms of the
// block values, then extracts its affine representation by evaluating it at
// zero and at each basis element of the decision space (exact, since the
// matrices are linear in the blocks), and finally realifies it:
//
//   M < 0  <=>  [Re M, -Im M; Im M, Re M] < 0.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/geometry.hpp"

namespace delaysync {

/// Single-agent dynamics x' = A x + B u.
struct AgentModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  /// Validates dimensions (A square, B with A.rows() rows, both nonempty).
  static AgentModel make(Eigen::MatrixXd A, Eigen::MatrixXd B);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  /// Delayed coupling matrix -B K for a feedback gain K (m x n).
  Eigen::MatrixXd delay_matrix(const Eigen::MatrixXd& K) const;
};

enum class BlockKind { kPositiveDefinite, kSymmetric, kRectangular };

struct DecisionBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  BlockKind kind = BlockKind::kPositiveDefinite;

  /// Scalar unknowns: upper triangle for symmetric kinds, all entries otherwise.
  int num_variables() const;
};

/// F(x) = F0 + sum_k x_k F_k with symmetric dense F_k.
struct AffineSymmetricMatrix {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coefficients;

  int dim() const { return static_cast<int>(constant.rows()); }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

/// H(x) = H0 + sum_k x_k H_k with Hermitian H_k and real unknowns x.
struct AffineHermitianMatrix {
  Eigen::MatrixXcd constant;
  std::vector<Eigen::MatrixXcd> coefficients;

  int dim() const { return static_cast<int>(constant.rows()); }
  Eigen::MatrixXcd evaluate(const Eigen::VectorXd& x) const;
};

enum class LmiKind { kDelayStability, kDescriptorDesign, kStacked };

std::string_view to_string(LmiKind kind);

/// Feasibility problem: find block values with PD-tagged blocks > 0 and
/// constraint(blocks) < 0. Strictness is encoded with the margin `margin`
/// (constraint <= -margin I, PD blocks >= margin I).
struct LmiProblem {
  std::vector<DecisionBlock> blocks;
  AffineSymmetricMatrix constraint;
  LmiKind kind = LmiKind::kDelayStability;
  std::vector<Complex> sigmas;
  double h = 0.0;
  double epsilon = 0.0;
  double margin = 1e-7;
  /// Blocks whose inverse is used downstream (gain recovery).
  std::vector<std::string> invertible_blocks;

  int num_variables() const;
  /// Index into `blocks`; throws std::out_of_range for an unknown name.
  int block_index(std::string_view name) const;
  /// Offset of a block's first scalar unknown in the decision vector.
  int variable_offset(int block) const;

  Eigen::VectorXd pack(const std::vector<Eigen::MatrixXd>& values) const;
  std::vector<Eigen::MatrixXd> unpack(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd constraint_at(const std::vector<Eigen::MatrixXd>& values) const;
};

/// Builds a problem from an arbitrary constraint that is affine in the block
/// values (for example a Lyapunov inequality). `constraint` must return a
/// symmetric matrix of fixed size; its affine form is extracted by evaluation.
LmiProblem custom_lmi(std::vector<DecisionBlock> blocks,
                      const std::function<Eigen::MatrixXd(const std::vector<Eigen::MatrixXd>&)>&
                          constraint,
                      double margin = 1e-7);

/// Concrete block values proposed as a solution.
struct LmiWitness {
  std::vector<Eigen::MatrixXd> blocks;
  /// Largest eigenvalue of the constraint matrix at `blocks`.
  double max_eig = 0.0;
};

/// Relative strictness margin 1e-7 * max(1, ||A||_2).
double feasibility_margin(const AgentModel& model);

/// Complex Hermitian 3n x 3n stability matrix for explicit P, S, R:
///   [A'P+PA+S-R,  s PAd+R,        hA'R    ]
///   [    *,       -S-R,      conj(s) hAd'R]
///   [    *,         *,            -R      ]
Eigen::MatrixXcd stability_matrix(const AgentModel& model, const Eigen::MatrixXd& Ad,
                                  Complex sigma, double h, const Eigen::MatrixXd& P,
                                  const Eigen::MatrixXd& S, const Eigen::MatrixXd& R);

/// Delay-dependent stability LMI for x' = A x + sigma Ad x(t - tau), all
/// tau in [0, h]. Blocks P, S, R (n x n, positive definite); realified 6n x 6n.
/// Throws std::invalid_argument on dimension mismatch or h < 0.
LmiProblem stability_lmi(const AgentModel& model, const Eigen::MatrixXd& Ad, Complex sigma,
                         double h);

/// [Re M, -Im M; Im M, Re M].
Eigen::MatrixXd realify(const Eigen::MatrixXcd& M);
AffineSymmetricMatrix realify(const AffineHermitianMatrix& H);

/// Complex 3n x 3n descriptor design matrix for explicit block values:
///   [Yb A'+A Yb+Sb-Rb,  -s B Xb+Rb,     Pb-Yb+eps Yb A'      ]
///   [      *,           -(Sb+Rb),    -conj(s) eps Xb' B'      ]
///   [      *,              *,        -2 eps Yb + h^2 Rb       ]
Eigen::MatrixXcd descriptor_matrix(const AgentModel& model, Complex sigma, double h,
                                   double epsilon, const Eigen::MatrixXd& Pb,
                                   const Eigen::MatrixXd& Sb, const Eigen::MatrixXd& Rb,
                                   const Eigen::MatrixXd& Yb, const Eigen::MatrixXd& Xb);

/// Descriptor-method synthesis LMI. Blocks Pbar, Sbar, Rbar (PD), Ybar
/// (symmetric, must be invertible), Xbar (m x n free). The gain is
/// K = Xbar * inv(Ybar). Throws std::invalid_argument for epsilon <= 0, h < 0.
LmiProblem descriptor_design_lmi(const AgentModel& model, Complex sigma, double h,
                                 double epsilon);

/// Conjunction of problems over shared decision blocks: the constraint is the
/// block-diagonal stack. Throws std::invalid_argument on block shape/tag
/// mismatch or an empty input.
LmiProblem common_blocks_problem(std::span<const LmiProblem> problems);

}  // namespace delaysync
