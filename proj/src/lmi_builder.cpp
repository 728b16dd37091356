#include "delaysync/lmi_builder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "delaysync/kernels.hpp"

namespace delaysync {

namespace {

using BlockValues = std::vector<Eigen::MatrixXd>;
using HermitianBuilder = std::function<Eigen::MatrixXcd(const BlockValues&)>;

Eigen::MatrixXd basis_matrix(const DecisionBlock& block, int local) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(block.rows, block.cols);
  if (block.kind == BlockKind::kRectangular) {
    e(local % block.rows, local / block.rows) = 1.0;
    return e;
  }
  // Upper triangle, column by column: (0,0), (0,1), (1,1), (0,2), ...
  int col = 0;
  while ((col + 1) * (col + 2) / 2 <= local) ++col;
  const int row = local - col * (col + 1) / 2;
  e(row, col) = 1.0;
  e(col, row) = 1.0;
  return e;
}

BlockValues zero_values(const std::vector<DecisionBlock>& blocks) {
  BlockValues v;
  v.reserve(blocks.size());
  for (const auto& b : blocks) v.push_back(Eigen::MatrixXd::Zero(b.rows, b.cols));
  return v;
}

AffineHermitianMatrix extract_affine(const std::vector<DecisionBlock>& blocks,
                                     const HermitianBuilder& build) {
  AffineHermitianMatrix out;
  BlockValues values = zero_values(blocks);
  out.constant = build(values);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int k = 0; k < blocks[b].num_variables(); ++k) {
      values[b] = basis_matrix(blocks[b], k);
      out.coefficients.push_back(build(values) - out.constant);
      values[b].setZero();
    }
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

Eigen::MatrixXcd assemble3x3(const Eigen::MatrixXcd& m11, const Eigen::MatrixXcd& m12,
                             const Eigen::MatrixXcd& m13, const Eigen::MatrixXcd& m22,
                             const Eigen::MatrixXcd& m23, const Eigen::MatrixXcd& m33) {
  const Eigen::Index n = m11.rows();
  Eigen::MatrixXcd M(3 * n, 3 * n);
  M << m11, m12, m13,
       m12.adjoint(), m22, m23,
       m13.adjoint(), m23.adjoint(), m33;
  return M;
}

}  // namespace

AgentModel AgentModel::make(Eigen::MatrixXd A, Eigen::MatrixXd B) {
  require(A.rows() > 0 && A.rows() == A.cols(), "A must be square and nonempty");
  require(B.rows() == A.rows() && B.cols() > 0, "B must have as many rows as A");
  require(A.allFinite() && B.allFinite(), "model matrices must be finite");
  return AgentModel{std::move(A), std::move(B)};
}

Eigen::MatrixXd AgentModel::delay_matrix(const Eigen::MatrixXd& K) const {
  require(K.rows() == m() && K.cols() == n(), "gain K must be m x n");
  return -B * K;
}

int DecisionBlock::num_variables() const {
  if (kind == BlockKind::kRectangular) return rows * cols;
  return rows * (rows + 1) / 2;
}

Eigen::MatrixXd AffineSymmetricMatrix::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != static_cast<Eigen::Index>(coefficients.size())) {
    throw std::invalid_argument("AffineSymmetricMatrix::evaluate: wrong variable count");
  }
  Eigen::MatrixXd out = constant;
  std::span<double> acc(out.data(), static_cast<std::size_t>(out.size()));
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (x(k) == 0.0) continue;
    const auto& c = coefficients[k];
    kernels::axpy(x(k), std::span<const double>(c.data(), static_cast<std::size_t>(c.size())),
                  acc);
  }
  return out;
}

Eigen::MatrixXcd AffineHermitianMatrix::evaluate(const Eigen::VectorXd& x) const {
  Eigen::MatrixXcd out = constant;
  for (std::size_t k = 0; k < coefficients.size(); ++k) out += x(k) * coefficients[k];
  return out;
}

std::string_view to_string(LmiKind kind) {
  switch (kind) {
    case LmiKind::kDelayStability:
      return "delay-stability";
    case LmiKind::kDescriptorDesign:
      return "descriptor-design";
    case LmiKind::kStacked:
      return "stacked";
  }
  return "unknown";
}

int LmiProblem::num_variables() const {
  int total = 0;
  for (const auto& b : blocks) total += b.num_variables();
  return total;
}

int LmiProblem::block_index(std::string_view name) const {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].name == name) return static_cast<int>(i);
  }
  throw std::out_of_range("no decision block named " + std::string(name));
}

int LmiProblem::variable_offset(int block) const {
  int offset = 0;
  for (int i = 0; i < block; ++i) offset += blocks[i].num_variables();
  return offset;
}

Eigen::VectorXd LmiProblem::pack(const std::vector<Eigen::MatrixXd>& values) const {
  require(values.size() == blocks.size(), "pack: wrong number of block values");
  Eigen::VectorXd x(num_variables());
  int k = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const auto& v = values[b];
    require(v.rows() == blk.rows && v.cols() == blk.cols, "pack: block " + blk.name + " has wrong shape");
    if (blk.kind == BlockKind::kRectangular) {
      for (int c = 0; c < blk.cols; ++c)
        for (int r = 0; r < blk.rows; ++r) x(k++) = v(r, c);
    } else {
      for (int c = 0; c < blk.rows; ++c)
        for (int r = 0; r <= c; ++r) x(k++) = 0.5 * (v(r, c) + v(c, r));
    }
  }
  return x;
}

std::vector<Eigen::MatrixXd> LmiProblem::unpack(const Eigen::VectorXd& x) const {
  require(x.size() == num_variables(), "unpack: wrong variable count");
  std::vector<Eigen::MatrixXd> values;
  int k = 0;
  for (const auto& blk : blocks) {
    Eigen::MatrixXd v(blk.rows, blk.cols);
    if (blk.kind == BlockKind::kRectangular) {
      for (int c = 0; c < blk.cols; ++c)
        for (int r = 0; r < blk.rows; ++r) v(r, c) = x(k++);
    } else {
      for (int c = 0; c < blk.rows; ++c)
        for (int r = 0; r <= c; ++r) v(r, c) = v(c, r) = x(k++);
    }
    values.push_back(std::move(v));
  }
  return values;
}

Eigen::MatrixXd LmiProblem::constraint_at(const std::vector<Eigen::MatrixXd>& values) const {
  return constraint.evaluate(pack(values));
}

LmiProblem custom_lmi(std::vector<DecisionBlock> blocks,
                      const std::function<Eigen::MatrixXd(const std::vector<Eigen::MatrixXd>&)>&
                          constraint,
                      double margin) {
  require(!blocks.empty(), "custom_lmi: no decision blocks");
  require(margin > 0.0, "custom_lmi: margin must be positive");
  for (const auto& b : blocks) {
    require(b.rows > 0 && b.cols > 0, "custom_lmi: empty block " + b.name);
    require(b.kind == BlockKind::kRectangular || b.rows == b.cols,
            "custom_lmi: symmetric block " + b.name + " must be square");
  }
  LmiProblem p;
  p.blocks = std::move(blocks);
  p.sigmas = {};
  p.margin = margin;
  const auto affine = extract_affine(p.blocks, [&](const BlockValues& v) {
    return Eigen::MatrixXcd(constraint(v).cast<Complex>());
  });
  p.constraint.constant = affine.constant.real();
  for (const auto& c : affine.coefficients) p.constraint.coefficients.push_back(c.real());
  return p;
}

double feasibility_margin(const AgentModel& model) {
  const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(model.A).singularValues()(0);
  return 1e-7 * std::max(1.0, norm);
}

Eigen::MatrixXcd stability_matrix(const AgentModel& model, const Eigen::MatrixXd& Ad,
                                  Complex sigma, double h, const Eigen::MatrixXd& P,
                                  const Eigen::MatrixXd& S, const Eigen::MatrixXd& R) {
  const Eigen::MatrixXcd A = model.A.cast<Complex>();
  const Eigen::MatrixXcd D = Ad.cast<Complex>();
  const Eigen::MatrixXcd Pc = P.cast<Complex>();
  const Eigen::MatrixXcd Sc = S.cast<Complex>();
  const Eigen::MatrixXcd Rc = R.cast<Complex>();
  return assemble3x3(A.transpose() * Pc + Pc * A + Sc - Rc,
                     sigma * Pc * D + Rc,
                     h * A.transpose() * Rc,
                     -Sc - Rc,
                     std::conj(sigma) * h * D.transpose() * Rc,
                     -Rc);
}

LmiProblem stability_lmi(const AgentModel& model, const Eigen::MatrixXd& Ad, Complex sigma,
                         double h) {
  const int n = model.n();
  require(Ad.rows() == n && Ad.cols() == n, "stability_lmi: Ad must be n x n");
  require(h >= 0.0 && std::isfinite(h), "stability_lmi: h must be finite and >= 0");
  require(std::isfinite(sigma.real()) && std::isfinite(sigma.imag()),
          "stability_lmi: sigma must be finite");

  LmiProblem p;
  p.kind = LmiKind::kDelayStability;
  p.sigmas = {sigma};
  p.h = h;
  p.margin = feasibility_margin(model);
  p.blocks = {{"P", n, n, BlockKind::kPositiveDefinite},
              {"S", n, n, BlockKind::kPositiveDefinite},
              {"R", n, n, BlockKind::kPositiveDefinite}};
  const auto hermitian = extract_affine(p.blocks, [&](const BlockValues& v) {
    return stability_matrix(model, Ad, sigma, h, v[0], v[1], v[2]);
  });
  p.constraint = realify(hermitian);
  return p;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& M) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXd out(2 * n, 2 * M.cols());
  out.topLeftCorner(n, M.cols()) = M.real();
  out.topRightCorner(n, M.cols()) = -M.imag();
  out.bottomLeftCorner(n, M.cols()) = M.imag();
  out.bottomRightCorner(n, M.cols()) = M.real();
  return out;
}

AffineSymmetricMatrix realify(const AffineHermitianMatrix& H) {
  AffineSymmetricMatrix out;
  out.constant = realify(H.constant);
  out.coefficients.reserve(H.coefficients.size());
  for (const auto& c : H.coefficients) out.coefficients.push_back(realify(c));
  return out;
}

Eigen::MatrixXcd descriptor_matrix(const AgentModel& model, Complex sigma, double h,
                                   double epsilon, const Eigen::MatrixXd& Pb,
                                   const Eigen::MatrixXd& Sb, const Eigen::MatrixXd& Rb,
                                   const Eigen::MatrixXd& Yb, const Eigen::MatrixXd& Xb) {
  const Eigen::MatrixXcd A = model.A.cast<Complex>();
  const Eigen::MatrixXcd B = model.B.cast<Complex>();
  const Eigen::MatrixXcd P = Pb.cast<Complex>();
  const Eigen::MatrixXcd S = Sb.cast<Complex>();
  const Eigen::MatrixXcd R = Rb.cast<Complex>();
  const Eigen::MatrixXcd Y = Yb.cast<Complex>();
  const Eigen::MatrixXcd X = Xb.cast<Complex>();
  return assemble3x3(Y * A.transpose() + A * Y + S - R,
                     -sigma * B * X + R,
                     P - Y.transpose() + epsilon * Y * A.transpose(),
                     -(S + R),
                     -std::conj(sigma) * epsilon * X.transpose() * B.transpose(),
                     -2.0 * epsilon * Y + h * h * R);
}

LmiProblem descriptor_design_lmi(const AgentModel& model, Complex sigma, double h,
                                 double epsilon) {
  require(epsilon > 0.0 && std::isfinite(epsilon), "descriptor_design_lmi: epsilon must be > 0");
  require(h >= 0.0 && std::isfinite(h), "descriptor_design_lmi: h must be finite and >= 0");
  const int n = model.n();
  const int m = model.m();

  LmiProblem p;
  p.kind = LmiKind::kDescriptorDesign;
  p.sigmas = {sigma};
  p.h = h;
  p.epsilon = epsilon;
  p.margin = feasibility_margin(model);
  p.blocks = {{"Pbar", n, n, BlockKind::kPositiveDefinite},
              {"Sbar", n, n, BlockKind::kPositiveDefinite},
              {"Rbar", n, n, BlockKind::kPositiveDefinite},
              {"Ybar", n, n, BlockKind::kSymmetric},
              {"Xbar", m, n, BlockKind::kRectangular}};
  p.invertible_blocks = {"Ybar"};
  const auto hermitian = extract_affine(p.blocks, [&](const BlockValues& v) {
    return descriptor_matrix(model, sigma, h, epsilon, v[0], v[1], v[2], v[3], v[4]);
  });
  p.constraint = realify(hermitian);
  return p;
}

LmiProblem common_blocks_problem(std::span<const LmiProblem> problems) {
  require(!problems.empty(), "common_blocks_problem: no problems given");
  const LmiProblem& first = problems.front();
  if (problems.size() == 1) return first;

  int total_dim = 0;
  for (const auto& p : problems) {
    require(p.blocks.size() == first.blocks.size(), "common_blocks_problem: block lists differ");
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      const auto& x = p.blocks[b];
      const auto& y = first.blocks[b];
      require(x.name == y.name && x.rows == y.rows && x.cols == y.cols && x.kind == y.kind,
              "common_blocks_problem: block " + x.name + " differs in shape or tag");
    }
    total_dim += p.constraint.dim();
  }

  LmiProblem out;
  out.kind = LmiKind::kStacked;
  out.blocks = first.blocks;
  out.h = first.h;
  out.epsilon = first.epsilon;
  out.invertible_blocks = first.invertible_blocks;
  out.margin = 0.0;
  const std::size_t nvar = first.constraint.coefficients.size();
  out.constraint.constant = Eigen::MatrixXd::Zero(total_dim, total_dim);
  out.constraint.coefficients.assign(nvar, Eigen::MatrixXd::Zero(total_dim, total_dim));
  int at = 0;
  for (const auto& p : problems) {
    const int d = p.constraint.dim();
    out.constraint.constant.block(at, at, d, d) = p.constraint.constant;
    for (std::size_t k = 0; k < nvar; ++k) {
      out.constraint.coefficients[k].block(at, at, d, d) = p.constraint.coefficients[k];
    }
    out.sigmas.insert(out.sigmas.end(), p.sigmas.begin(), p.sigmas.end());
    out.margin = std::max(out.margin, p.margin);
    at += d;
  }
  return out;
}

}  // namespace delaysync
