#include "delaysync/sdp_feasibility.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace delaysync {

namespace {

constexpr double kBallRadius = 1.0;
constexpr double kResidualTol = 1e-7;

struct Floor {
  int block = -1;
  double value = 0.0;
};

sdp::LmiForm build_form(const LmiProblem& problem, const std::vector<Floor>& floors) {
  const int nv = problem.num_variables();
  const int t = nv;
  sdp::LmiForm form;
  form.cost = Eigen::VectorXd::Zero(nv + 1);
  form.cost(t) = 1.0;

  const int d = problem.constraint.dim();
  sdp::LmiBlock main;
  main.constant = -problem.constraint.constant;
  for (int k = 0; k < nv; ++k) {
    const auto& f = problem.constraint.coefficients[k];
    if (f.cwiseAbs().maxCoeff() != 0.0) main.terms.emplace_back(k, -f);
  }
  main.terms.emplace_back(t, Eigen::MatrixXd::Identity(d, d));
  form.blocks.push_back(std::move(main));

  auto block_terms = [&](int b, sdp::LmiBlock& blk) {
    const int offset = problem.variable_offset(b);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(nv);
    for (int k = 0; k < problem.blocks[b].num_variables(); ++k) {
      e(offset + k) = 1.0;
      blk.terms.emplace_back(offset + k, problem.unpack(e)[b]);
      e(offset + k) = 0.0;
    }
  };

  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    const auto& info = problem.blocks[b];
    if (info.kind != BlockKind::kPositiveDefinite) continue;
    sdp::LmiBlock blk;
    blk.constant = Eigen::MatrixXd::Zero(info.rows, info.rows);
    block_terms(static_cast<int>(b), blk);
    blk.terms.emplace_back(t, Eigen::MatrixXd::Identity(info.rows, info.rows));
    form.blocks.push_back(std::move(blk));
  }

  for (const auto& fl : floors) {
    const auto& info = problem.blocks[fl.block];
    sdp::LmiBlock blk;
    blk.constant = -fl.value * Eigen::MatrixXd::Identity(info.rows, info.rows);
    block_terms(fl.block, blk);
    form.blocks.push_back(std::move(blk));
  }

  // ||x|| <= r  <=>  [r I, x; x', r] >= 0.
  sdp::LmiBlock ball;
  ball.constant = kBallRadius * Eigen::MatrixXd::Identity(nv + 1, nv + 1);
  for (int k = 0; k < nv; ++k) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nv + 1, nv + 1);
    g(k, nv) = g(nv, k) = 1.0;
    ball.terms.emplace_back(k, std::move(g));
  }
  form.blocks.push_back(std::move(ball));
  return form;
}

double max_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

FeasibilityResult solve_once(const LmiProblem& problem, const FeasibilityOptions& options,
                             const std::vector<Floor>& floors) {
  FeasibilityResult out;
  const sdp::Result r = sdp::solve(build_form(problem, floors), options.solver);
  const int nv = problem.num_variables();
  out.solver_status = r.status;
  out.iterations = r.iterations;
  out.t_upper = r.objective;
  out.t_lower = r.lower_bound;

  std::ostringstream detail;
  detail << "solver " << sdp::to_string(r.status) << " after " << r.iterations
         << " iterations, t in [" << r.lower_bound << ", " << r.objective << "]";

  if (r.status == sdp::Status::kNumericalFailure) {
    out.verdict = Feasibility::kInconclusive;
    out.detail = detail.str();
    return out;
  }

  const double margin = problem.margin;
  if (r.dual_residual < kResidualTol && r.objective <= -margin) {
    auto blocks = problem.unpack(r.y.head(nv));
    const WitnessCheck check = verify_witness(problem, blocks);
    if (check.ok) {
      out.verdict = Feasibility::kFeasible;
      out.witness = LmiWitness{std::move(blocks), check.constraint_max_eig};
    } else {
      out.verdict = Feasibility::kInconclusive;
      detail << "; witness failed verification (max eig " << check.constraint_max_eig << ")";
    }
  } else if ((r.status == sdp::Status::kOptimal && r.objective > -margin) ||
             (r.primal_residual < kResidualTol && r.lower_bound > -margin)) {
    out.verdict = Feasibility::kInfeasible;
  } else {
    out.verdict = Feasibility::kInconclusive;
  }
  out.detail = detail.str();
  return out;
}

FeasibilityResult check_feasible_impl(const LmiProblem& problem,
                                      const FeasibilityOptions& options);

}  // namespace

std::string_view to_string(Feasibility f) {
  switch (f) {
    case Feasibility::kFeasible:
      return "feasible";
    case Feasibility::kInfeasible:
      return "infeasible";
    case Feasibility::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

WitnessCheck verify_witness(const LmiProblem& problem,
                            const std::vector<Eigen::MatrixXd>& blocks) {
  WitnessCheck out;
  out.constraint_max_eig = max_eig(problem.constraint_at(blocks));
  out.block_min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    if (problem.blocks[b].kind == BlockKind::kPositiveDefinite) {
      out.block_min_eig = std::min(out.block_min_eig, min_eig(blocks[b]));
    }
  }
  out.ok = out.constraint_max_eig < -0.5 * problem.margin &&
           out.block_min_eig >= 0.5 * problem.margin;
  return out;
}

double condition_number(const Eigen::MatrixXd& block) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

FeasibilityResult check_feasible(const LmiProblem& problem, const FeasibilityOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  FeasibilityResult result = check_feasible_impl(problem, options);
  if (result.witness) result.slack = -result.witness->max_eig;
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

namespace {

FeasibilityResult check_feasible_impl(const LmiProblem& problem,
                                      const FeasibilityOptions& options) {
  if (problem.constraint.coefficients.size() != static_cast<std::size_t>(problem.num_variables())) {
    throw std::invalid_argument("check_feasible: constraint does not match decision blocks");
  }
  FeasibilityResult first = solve_once(problem, options, {});
  if (first.verdict != Feasibility::kFeasible || problem.invertible_blocks.empty()) return first;

  std::vector<Floor> floors;
  for (const auto& name : problem.invertible_blocks) {
    const int b = problem.block_index(name);
    if (condition_number(first.witness->blocks[b]) > options.max_condition) {
      // Keep the block away from singularity; any witness of the restricted
      // problem is still a witness of the original one.
      floors.push_back({b, 1e-6 * kBallRadius});
    }
  }
  if (floors.empty()) return first;

  FeasibilityResult second = solve_once(problem, options, floors);
  if (second.verdict == Feasibility::kFeasible) {
    for (const auto& fl : floors) {
      if (condition_number(second.witness->blocks[fl.block]) > options.max_condition) {
        second.verdict = Feasibility::kInconclusive;
        second.witness.reset();
        second.detail += "; ill-conditioned " + problem.blocks[fl.block].name;
        return second;
      }
    }
    return second;
  }
  second.verdict = Feasibility::kInconclusive;
  second.witness.reset();
  second.detail += "; re-solve after ill-conditioned witness did not succeed";
  return second;
}

}  // namespace

}  // namespace delaysync
