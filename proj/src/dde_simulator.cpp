#include "delaysync/dde_simulator.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "delaysync/kernels.hpp"

namespace delaysync {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<double> view(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// out = f(y, y_delayed).
using Rhs = std::function<void(const Eigen::VectorXd& y, const Eigen::VectorXd& yd,
                               Eigen::VectorXd& out)>;
// State at a time theta < 0.
using History = std::function<Eigen::VectorXd(double theta)>;

struct Solution {
  Eigen::MatrixXd states;  // dim x (steps + 1), column k at t = k dt
  long last = 0;           // index of the last valid column
  bool diverged = false;
};

// Method of steps with lag = delay_steps grid intervals (0 for no delay).
Solution integrate(int dim, const Rhs& f, const History& history, const Eigen::VectorXd& y0,
                   long delay_steps, double dt, long steps, double threshold) {
  Solution sol;
  sol.states.resize(dim, steps + 1);
  Eigen::MatrixXd deriv(dim, steps + 1);
  sol.states.col(0) = y0;

  Eigen::VectorXd y(dim), yd(dim), stage(dim), k1(dim), k2(dim), k3(dim), k4(dim);

  // Delayed state at grid index j + frac (frac in {0, 0.5, 1}).
  auto delayed = [&](long j, double frac, Eigen::VectorXd& out) {
    const double t = (static_cast<double>(j) + frac) * dt;
    if (t < 0.0) {
      out = history(t);
    } else if (frac == 0.0) {
      out = sol.states.col(j);
    } else if (frac == 1.0) {
      out = sol.states.col(j + 1);
    } else {
      // Cubic Hermite at the midpoint of [j, j + 1].
      out = 0.5 * (sol.states.col(j) + sol.states.col(j + 1)) +
            (dt / 8.0) * (deriv.col(j) - deriv.col(j + 1));
    }
  };

  for (long k = 0; k < steps; ++k) {
    y = sol.states.col(k);
    const long j = k - delay_steps;
    if (delay_steps == 0) {
      f(y, y, k1);
      deriv.col(k) = k1;
      stage = y + 0.5 * dt * k1;
      f(stage, stage, k2);
      stage = y + 0.5 * dt * k2;
      f(stage, stage, k3);
      stage = y + dt * k3;
      f(stage, stage, k4);
    } else {
      delayed(j, 0.0, yd);
      f(y, yd, k1);
      deriv.col(k) = k1;
      delayed(j, 0.5, yd);
      stage = y + 0.5 * dt * k1;
      f(stage, yd, k2);
      stage = y + 0.5 * dt * k2;
      f(stage, yd, k3);
      delayed(j, 1.0, yd);
      stage = y + dt * k3;
      f(stage, yd, k4);
    }
    Eigen::VectorXd next = y;
    auto acc = view(next);
    kernels::axpy(dt / 6.0, view(k1), acc);
    kernels::axpy(dt / 3.0, view(k2), acc);
    kernels::axpy(dt / 3.0, view(k3), acc);
    kernels::axpy(dt / 6.0, view(k4), acc);
    sol.states.col(k + 1) = next;
    sol.last = k + 1;
    if (!next.allFinite() || next.norm() > threshold) {
      sol.diverged = true;
      break;
    }
  }
  return sol;
}

Eigen::VectorXd agent_state_at(const SimulationConfig& cfg, int i, double theta) {
  if (cfg.agent_history) {
    Eigen::VectorXd x = cfg.agent_history(i, theta);
    if (x.size() != cfg.model.n()) throw std::invalid_argument("agent history has wrong length");
    return x;
  }
  return cfg.agent_x0[i];
}

Trajectory make_trajectory(const SimulationConfig& cfg, double dt, long last) {
  Trajectory tr;
  tr.dt = dt;
  const long count = last + 1;
  tr.times.resize(count);
  for (long k = 0; k < count; ++k) tr.times[k] = k * dt;
  tr.leader_states.resize(count, cfg.model.n());
  tr.agent_states.assign(cfg.graph.n_agents(), Eigen::MatrixXd(count, cfg.model.n()));
  tr.sync_error_norm.resize(count);
  return tr;
}

}  // namespace

void SimulationConfig::validate() const {
  const int n = model.n();
  const int N = graph.n_agents();
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(K.rows() == model.m() && K.cols() == n, "simulation: gain must be m x n");
  require(tau >= 0.0 && std::isfinite(tau), "simulation: tau must be finite and >= 0");
  require(dt > 0.0 && std::isfinite(dt), "simulation: dt must be positive");
  require(t_final > 0.0 && std::isfinite(t_final), "simulation: t_final must be positive");
  require(leader_x0.size() == n, "simulation: leader state has wrong length");
  require(static_cast<int>(agent_x0.size()) == N, "simulation: need one initial state per agent");
  for (const auto& x : agent_x0) require(x.size() == n, "simulation: agent state has wrong length");
  require(divergence_threshold > 0.0, "simulation: divergence threshold must be positive");
}

double SimulationConfig::effective_dt() const {
  if (tau == 0.0) return dt;
  const double ratio = tau / dt;
  const double m = std::ceil(ratio - 1e-12 * std::max(1.0, ratio));
  return tau / m;
}

long SimulationConfig::steps() const {
  const double h = effective_dt();
  const double ratio = t_final / h;
  return static_cast<long>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

Eigen::VectorXd Trajectory::delta(std::size_t k) const {
  const auto N = agent_states.size();
  const auto n = leader_states.cols();
  Eigen::VectorXd d(N * n);
  for (std::size_t i = 0; i < N; ++i) {
    d.segment(i * n, n) = (agent_states[i].row(k) - leader_states.row(k)).transpose();
  }
  return d;
}

Trajectory simulate(const SimulationConfig& cfg) {
  cfg.validate();
  const int n = cfg.model.n();
  const int N = cfg.graph.n_agents();
  const int dim = N * n;
  const double dt = cfg.effective_dt();
  const long steps = cfg.steps();
  const long lag = cfg.tau == 0.0 ? 0 : std::lround(cfg.tau / dt);

  const Eigen::MatrixXd M = build_pinned_laplacian(cfg.graph);
  const Eigen::MatrixXd BK = cfg.model.B * cfg.K;
  Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd coupling(dim, dim);
  for (int i = 0; i < N; ++i) {
    drift.block(i * n, i * n, n, n) = cfg.model.A;
    for (int j = 0; j < N; ++j) coupling.block(i * n, j * n, n, n) = M(i, j) * BK;
  }
  if (cfg.tau == 0.0) {
    drift -= coupling;
    coupling.setZero();
  }
  const Rhs f = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& yd, Eigen::VectorXd& out) {
    out.resize(dim);
    kernels::gemv(dim, dim, 1.0, {drift.data(), static_cast<std::size_t>(drift.size())}, view(y),
                  0.0, view(out));
    if (cfg.tau != 0.0) {
      kernels::gemv(dim, dim, -1.0, {coupling.data(), static_cast<std::size_t>(coupling.size())},
                    view(yd), 1.0, view(out));
    }
  };
  const History history = [&](double theta) {
    Eigen::VectorXd d(dim);
    for (int i = 0; i < N; ++i) d.segment(i * n, n) = agent_state_at(cfg, i, theta) - cfg.leader_x0;
    return d;
  };
  Eigen::VectorXd d0(dim);
  for (int i = 0; i < N; ++i) d0.segment(i * n, n) = cfg.agent_x0[i] - cfg.leader_x0;

  const Solution err = integrate(dim, f, history, d0, lag, dt, steps, cfg.divergence_threshold);

  const Rhs leader_f = [&](const Eigen::VectorXd& y, const Eigen::VectorXd&, Eigen::VectorXd& out) {
    out = cfg.model.A * y;
  };
  const Solution lead = integrate(n, leader_f, nullptr, cfg.leader_x0, 0, dt, err.last,
                                  std::numeric_limits<double>::infinity());

  Trajectory tr = make_trajectory(cfg, dt, err.last);
  tr.diverged = err.diverged;
  for (long k = 0; k <= err.last; ++k) {
    tr.leader_states.row(k) = lead.states.col(k).transpose();
    for (int i = 0; i < N; ++i) {
      tr.agent_states[i].row(k) =
          (err.states.col(k).segment(i * n, n) + lead.states.col(k)).transpose();
    }
    tr.sync_error_norm(k) = err.states.col(k).norm();
  }
  return tr;
}

Trajectory simulate_agents(const SimulationConfig& cfg) {
  cfg.validate();
  const int n = cfg.model.n();
  const int N = cfg.graph.n_agents();
  const int dim = (N + 1) * n;  // leader first
  const double dt = cfg.effective_dt();
  const long steps = cfg.steps();
  const long lag = cfg.tau == 0.0 ? 0 : std::lround(cfg.tau / dt);
  const Eigen::MatrixXd& a = cfg.graph.adjacency();
  const Eigen::VectorXd& g = cfg.graph.pinning();

  const Rhs f = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& yd, Eigen::VectorXd& out) {
    out.resize(dim);
    out.head(n) = cfg.model.A * y.head(n);
    for (int i = 0; i < N; ++i) {
      const auto xi = yd.segment((i + 1) * n, n);
      Eigen::VectorXd e = g(i) * (yd.head(n) - xi);
      for (int j = 0; j < N; ++j) {
        if (a(i, j) != 0.0) e += a(i, j) * (yd.segment((j + 1) * n, n) - xi);
      }
      out.segment((i + 1) * n, n) = cfg.model.A * y.segment((i + 1) * n, n) + cfg.model.B * (cfg.K * e);
    }
  };
  const History history = [&](double theta) {
    Eigen::VectorXd x(dim);
    x.head(n) = cfg.leader_x0;
    for (int i = 0; i < N; ++i) x.segment((i + 1) * n, n) = agent_state_at(cfg, i, theta);
    return x;
  };
  Eigen::VectorXd x0(dim);
  x0.head(n) = cfg.leader_x0;
  for (int i = 0; i < N; ++i) x0.segment((i + 1) * n, n) = cfg.agent_x0[i];

  const Solution sol = integrate(dim, f, history, x0, lag, dt, steps, cfg.divergence_threshold);
  Trajectory tr = make_trajectory(cfg, dt, sol.last);
  tr.diverged = sol.diverged;
  for (long k = 0; k <= sol.last; ++k) {
    const auto col = sol.states.col(k);
    tr.leader_states.row(k) = col.head(n).transpose();
    double sq = 0.0;
    for (int i = 0; i < N; ++i) {
      tr.agent_states[i].row(k) = col.segment((i + 1) * n, n).transpose();
      sq += (col.segment((i + 1) * n, n) - col.head(n)).squaredNorm();
    }
    tr.sync_error_norm(k) = std::sqrt(sq);
  }
  return tr;
}

double convergence_order_check(const SimulationConfig& cfg) {
  cfg.validate();
  SimulationConfig run = cfg;
  run.dt = cfg.effective_dt();
  auto terminal = [&](double dt) {
    run.dt = dt;
    const Trajectory tr = simulate(run);
    if (tr.diverged) throw std::runtime_error("convergence_order_check: run diverged");
    return std::make_pair(tr.delta(tr.times.size() - 1), tr.times.back());
  };
  const double dt = run.dt;
  const auto [coarse, t1] = terminal(dt);
  const auto [fine, t2] = terminal(dt / 2.0);
  const auto [ref, t3] = terminal(dt / 8.0);
  if (std::abs(t1 - t3) > 1e-9 * std::max(1.0, t3) || std::abs(t2 - t3) > 1e-9 * std::max(1.0, t3)) {
    throw std::runtime_error("convergence_order_check: final times differ between step sizes");
  }
  const double e1 = (coarse - ref).norm();
  const double e2 = (fine - ref).norm();
  const double floor = 1e-13 * std::max(1.0, ref.norm());
  if (e1 <= floor || e2 <= floor) {
    throw std::runtime_error("convergence_order_check: errors at round-off level; increase dt");
  }
  return std::log2(e1 / e2);
}

std::vector<Eigen::VectorXd> random_initial_states(int count, int n, double lo, double hi,
                                                   std::uint64_t seed) {
  if (count < 0 || n <= 0 || !(hi >= lo)) throw std::invalid_argument("random_initial_states: bad arguments");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = dist(rng);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace delaysync
