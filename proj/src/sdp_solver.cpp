#include "delaysync/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "delaysync/kernels.hpp"

namespace delaysync::sdp {

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

std::span<const double> view(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

double frob_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return kernels::dot(view(a), view(b));
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with X + alpha D >= 0 (infinity when D does not leave the cone).
double max_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto L = llt.matrixL();
  const Eigen::MatrixXd half = L.solve(D);
  const Eigen::MatrixXd full = L.solve(half.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(full), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step(const Blocks& X, const Blocks& D) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < X.size(); ++b) alpha = std::min(alpha, max_step(X[b], D[b]));
  return alpha;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += frob_dot(a[k], b[k]);
  return s;
}

double frob_norm(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

class Solver {
 public:
  Solver(const LmiForm& p, const Settings& s) : p_(p), s_(s), nvar_(p.num_variables()) {
    b_ = -p.cost;
    for (const auto& blk : p.blocks) dim_ += static_cast<int>(blk.constant.rows());
  }

  Result run() {
    initialize();
    Result res;
    res.y = y_;
    const double norm_b = b_.norm();
    double norm_c = 0.0;
    for (const auto& blk : p_.blocks) norm_c += blk.constant.squaredNorm();
    norm_c = std::sqrt(norm_c);

    for (int iter = 0; iter <= s_.max_iterations; ++iter) {
      const Eigen::VectorXd rp = b_ - apply_a(X_);
      Blocks rd = dual_residual();
      const double pobj = primal_objective();
      const double dobj = b_.dot(y_);
      const double gap = inner(X_, Z_);

      res.iterations = iter;
      res.y = y_;
      res.objective = -dobj;
      res.lower_bound = -pobj;
      res.relative_gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
      res.primal_residual = rp.norm() / (1.0 + norm_b);
      res.dual_residual = frob_norm(rd) / (1.0 + norm_c);
      if (!std::isfinite(res.relative_gap) || !std::isfinite(res.primal_residual) ||
          !std::isfinite(res.dual_residual)) {
        res.status = Status::kNumericalFailure;
        return res;
      }
      if (res.relative_gap < s_.tolerance && res.primal_residual < s_.tolerance &&
          res.dual_residual < s_.tolerance) {
        res.status = Status::kOptimal;
        return res;
      }
      if (iter == s_.max_iterations) break;

      if (!factor()) {
        res.status = Status::kNumericalFailure;
        return res;
      }
      const double mu = gap / dim_;

      // Predictor (affine scaling) direction.
      Eigen::VectorXd dy;
      Blocks dX, dZ;
      direction(rd, 0.0, nullptr, nullptr, dy, dX, dZ);
      const double ap = std::min(1.0, max_step(X_, dX));
      const double ad = std::min(1.0, max_step(Z_, dZ));
      double mu_aff = 0.0;
      for (std::size_t b = 0; b < X_.size(); ++b) {
        mu_aff += frob_dot(X_[b] + ap * dX[b], Z_[b] + ad * dZ[b]);
      }
      mu_aff /= dim_;
      const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
      const double centering = ratio * ratio * ratio;

      // Corrector with the second-order term of the predictor.
      Eigen::VectorXd cy;
      Blocks cX, cZ;
      direction(rd, centering * mu, &dX, &dZ, cy, cX, cZ);
      const double fraction = std::min(s_.max_step_fraction, 0.9 + 0.09 * std::min(ap, ad));
      const double alpha_p = std::min(1.0, fraction * max_step(X_, cX));
      const double alpha_d = std::min(1.0, fraction * max_step(Z_, cZ));
      if (!(alpha_p > 1e-12 || alpha_d > 1e-12)) {
        res.status = Status::kNumericalFailure;
        return res;
      }
      for (std::size_t b = 0; b < X_.size(); ++b) {
        X_[b] = sym(X_[b] + alpha_p * cX[b]);
        Z_[b] = sym(Z_[b] + alpha_d * cZ[b]);
      }
      y_ += alpha_d * cy;
    }
    res.status = Status::kIterationLimit;
    return res;
  }

 private:
  void initialize() {
    y_ = Eigen::VectorXd::Zero(nvar_);
    X_.clear();
    Z_.clear();
    for (const auto& blk : p_.blocks) {
      const double n = static_cast<double>(blk.constant.rows());
      double max_g = 0.0;
      double ratio = 0.0;
      for (const auto& [i, g] : blk.terms) {
        const double ng = g.norm();
        max_g = std::max(max_g, ng);
        ratio = std::max(ratio, (1.0 + std::abs(b_(i))) / (1.0 + ng));
      }
      const double xi = std::max({10.0, std::sqrt(n), n * ratio});
      const double eta = std::max({10.0, std::sqrt(n), max_g, blk.constant.norm()});
      X_.push_back(xi * Eigen::MatrixXd::Identity(blk.constant.rows(), blk.constant.rows()));
      Z_.push_back(eta * Eigen::MatrixXd::Identity(blk.constant.rows(), blk.constant.rows()));
    }
  }

  // A(T)_i = <A_i, T> with A_i = -G_i.
  Eigen::VectorXd apply_a(const Blocks& T) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nvar_);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
      for (const auto& [i, g] : p_.blocks[b].terms) out(i) -= frob_dot(g, T[b]);
    }
    return out;
  }

  // C - Z - A'(y) = S(y) - Z.
  Blocks dual_residual() const {
    Blocks rd = p_.evaluate(y_);
    for (std::size_t b = 0; b < rd.size(); ++b) rd[b] -= Z_[b];
    return rd;
  }

  double primal_objective() const {
    double s = 0.0;
    for (std::size_t b = 0; b < X_.size(); ++b) s += frob_dot(p_.blocks[b].constant, X_[b]);
    return s;
  }

  // Schur complement M_ij = tr(G_i X G_j Z^-1), factored for reuse by both
  // directions of the iteration.
  bool factor() {
    zinv_.clear();
    for (const auto& z : Z_) {
      Eigen::LLT<Eigen::MatrixXd> llt(z);
      if (llt.info() != Eigen::Success) return false;
      zinv_.push_back(llt.solve(Eigen::MatrixXd::Identity(z.rows(), z.cols())));
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nvar_, nvar_);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
      const auto& terms = p_.blocks[b].terms;
      for (const auto& [j, gj] : terms) {
        const Eigen::MatrixXd w = zinv_[b] * gj * X_[b];
        for (const auto& [i, gi] : terms) M(i, j) += frob_dot(gi, w);
      }
    }
    M = sym(M);
    chol_.compute(M);
    if (chol_.info() == Eigen::Success) return true;
    const double shift = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    M.diagonal().array() += shift;
    chol_.compute(M);
    return chol_.info() == Eigen::Success;
  }

  void direction(const Blocks& rd, double nu, const Blocks* pred_x, const Blocks* pred_z,
                 Eigen::VectorXd& dy, Blocks& dX, Blocks& dZ) const {
    const std::size_t nb = X_.size();
    Blocks t(nb);
    Blocks second(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      t[b] = sym(X_[b] * rd[b] * zinv_[b]) - nu * zinv_[b];
      if (pred_x != nullptr) {
        second[b] = (*pred_x)[b] * (*pred_z)[b] * zinv_[b];
        t[b] += sym(second[b]);
      }
    }
    dy = chol_.solve(b_ + apply_a(t));
    dZ = rd;
    for (std::size_t b = 0; b < nb; ++b) {
      for (const auto& [i, g] : p_.blocks[b].terms) dZ[b] += dy(i) * g;
    }
    dX.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::MatrixXd d = nu * zinv_[b] - X_[b] - X_[b] * dZ[b] * zinv_[b];
      if (pred_x != nullptr) d -= second[b];
      dX[b] = sym(d);
    }
  }

  const LmiForm& p_;
  const Settings& s_;
  int nvar_ = 0;
  int dim_ = 0;
  Eigen::VectorXd b_;
  Eigen::VectorXd y_;
  Blocks X_;
  Blocks Z_;
  Blocks zinv_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
};

}  // namespace

void LmiForm::validate() const {
  if (blocks.empty()) throw std::invalid_argument("sdp: no constraint blocks");
  if (!cost.allFinite()) throw std::invalid_argument("sdp: non-finite cost");
  std::vector<char> used(cost.size(), 0);
  for (const auto& blk : blocks) {
    const auto n = blk.constant.rows();
    if (n == 0 || blk.constant.cols() != n || !blk.constant.allFinite()) {
      throw std::invalid_argument("sdp: block constant must be square, nonempty and finite");
    }
    for (const auto& [i, g] : blk.terms) {
      if (i < 0 || i >= cost.size()) throw std::invalid_argument("sdp: variable index out of range");
      if (g.rows() != n || g.cols() != n || !g.allFinite()) {
        throw std::invalid_argument("sdp: coefficient shape mismatch in variable " +
                                    std::to_string(i));
      }
      used[i] = 1;
    }
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) throw std::invalid_argument("sdp: variable " + std::to_string(i) + " appears in no block");
  }
}

std::vector<Eigen::MatrixXd> LmiForm::evaluate(const Eigen::VectorXd& y) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) {
    Eigen::MatrixXd s = blk.constant;
    std::span<double> acc(s.data(), static_cast<std::size_t>(s.size()));
    for (const auto& [i, g] : blk.terms) {
      if (y(i) != 0.0) kernels::axpy(y(i), view(g), acc);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kIterationLimit:
      return "iteration-limit";
    case Status::kNumericalFailure:
      return "numerical-failure";
  }
  return "unknown";
}

Result solve(const LmiForm& problem, const Settings& settings) {
  problem.validate();
  return Solver(problem, settings).run();
}

}  // namespace delaysync::sdp
