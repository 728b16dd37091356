#include "delaysync/delay_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "delaysync/parallel.hpp"

namespace delaysync {

namespace {

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : default_jobs(); }

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

// Grid probe cache for the boundary trace. Results are only consumed after a
// whole batch has completed, so the trace is independent of completion order.
class GridProbe {
 public:
  GridProbe(const AgentModel& model, const Eigen::MatrixXd& K, double h, double delta,
            const AnalysisOptions& options)
      : model_(model), K_(K), h_(h), delta_(delta), options_(options),
        width_(resolve_jobs(options.jobs)) {}

  int width() const { return width_; }
  int probes() const { return probes_; }
  int inconclusive() const { return inconclusive_; }

  Complex point(int i, int j) const { return {i * delta_, j * delta_}; }

  void ensure(const std::vector<std::pair<int, int>>& points) {
    std::vector<std::pair<int, int>> todo;
    for (const auto& p : points) {
      if (!cache_.contains(p) &&
          std::find(todo.begin(), todo.end(), p) == todo.end()) {
        todo.push_back(p);
      }
    }
    std::vector<Feasibility> out(todo.size());
    parallel_for(todo.size(), options_.jobs, [&](std::size_t k) {
      const auto [i, j] = todo[k];
      out[k] = check_feasible(analysis_lmi(model_, K_, point(i, j), h_), options_.feasibility)
                   .verdict;
    });
    for (std::size_t k = 0; k < todo.size(); ++k) {
      cache_[todo[k]] = out[k];
      ++probes_;
      if (out[k] == Feasibility::kInconclusive) ++inconclusive_;
    }
  }

  bool feasible(int i, int j) {
    ensure({{i, j}});
    return cache_.at({i, j}) == Feasibility::kFeasible;
  }

 private:
  const AgentModel& model_;
  const Eigen::MatrixXd& K_;
  double h_;
  double delta_;
  const AnalysisOptions& options_;
  int width_;
  int probes_ = 0;
  int inconclusive_ = 0;
  std::map<std::pair<int, int>, Feasibility> cache_;
};

}  // namespace

std::string_view to_string(SyncOutcome outcome) {
  switch (outcome) {
    case SyncOutcome::kCertified:
      return "certified";
    case SyncOutcome::kNotCertified:
      return "not-certified";
    case SyncOutcome::kIndeterminate:
      return "indeterminate";
  }
  return "unknown";
}

std::string_view to_string(DelayBoundStatus status) {
  switch (status) {
    case DelayBoundStatus::kBounded:
      return "bounded";
    case DelayBoundStatus::kUnbounded:
      return "unbounded";
    case DelayBoundStatus::kUndefined:
      return "undefined";
  }
  return "unknown";
}

LmiProblem analysis_lmi(const AgentModel& model, const Eigen::MatrixXd& K, Complex sigma,
                        double h) {
  return stability_lmi(model, model.delay_matrix(K), sigma, h);
}

RobustCheck robust_sync_check(const AgentModel& model, const Eigen::MatrixXd& K,
                              std::span<const Complex> vertices, double h,
                              const AnalysisOptions& options) {
  if (vertices.empty()) throw std::invalid_argument("robust_sync_check: no vertices");
  if (!(h >= 0.0)) throw std::invalid_argument("robust_sync_check: h must be >= 0");
  RobustCheck out;
  out.vertices.resize(vertices.size());
  parallel_for(vertices.size(), options.jobs, [&](std::size_t k) {
    const auto r = check_feasible(analysis_lmi(model, K, vertices[k], h), options.feasibility);
    out.vertices[k] = {vertices[k], r.verdict, r.slack};
  });
  bool any_inconclusive = false;
  for (const auto& v : out.vertices) {
    if (v.verdict == Feasibility::kInfeasible) {
      out.outcome = SyncOutcome::kNotCertified;
      return out;
    }
    any_inconclusive |= v.verdict == Feasibility::kInconclusive;
  }
  out.outcome = any_inconclusive ? SyncOutcome::kIndeterminate : SyncOutcome::kCertified;
  return out;
}

RobustCheck robust_sync_check(const AgentModel& model, const Eigen::MatrixXd& K,
                              const PinnedSpectrum& spectrum, double h,
                              const AnalysisOptions& options) {
  const auto hull = eigenvalue_hull(spectrum);
  return robust_sync_check(model, K, hull, h, options);
}

DelayBoundResult max_delay_bound(const AgentModel& model, const Eigen::MatrixXd& K,
                                 std::span<const Complex> vertices, double tol,
                                 const DelayBoundOptions& options) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("max_delay_bound: tolerance must be positive");
  }
  if (vertices.empty()) throw std::invalid_argument("max_delay_bound: no vertices");
  if (!(options.h_cap > tol)) throw std::invalid_argument("max_delay_bound: h_cap must exceed tol");

  DelayBoundResult res;
  res.tolerance = tol;
  res.h_cap = options.h_cap;
  res.per_vertex.resize(vertices.size());
  std::vector<int> inconclusive(vertices.size(), 0);
  std::vector<char> undefined(vertices.size(), 0);
  const auto& fopt = options.analysis.feasibility;

  parallel_for(vertices.size(), options.analysis.jobs, [&](std::size_t k) {
    const Complex v = vertices[k];
    auto feasible = [&](double h) {
      const auto verdict = check_feasible(analysis_lmi(model, K, v, h), fopt).verdict;
      if (verdict == Feasibility::kInconclusive) ++inconclusive[k];
      return verdict == Feasibility::kFeasible;
    };
    VertexBound& vb = res.per_vertex[k];
    vb.vertex = v;
    if (!feasible(0.0)) {
      undefined[k] = 1;
      vb.h_feasible = 0.0;
      vb.h_infeasible = 0.0;
      return;
    }
    double lo = 0.0;
    double hi = tol;
    while (hi < options.h_cap && feasible(hi)) {
      lo = hi;
      hi *= 2.0;
    }
    if (hi >= options.h_cap) {
      hi = options.h_cap;
      if (feasible(hi)) {
        vb.h_feasible = hi;
        vb.h_infeasible = std::numeric_limits<double>::infinity();
        return;
      }
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
    vb.h_feasible = lo;
    vb.h_infeasible = hi;
  });

  for (int c : inconclusive) res.inconclusive_probes += c;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (undefined[k]) {
      res.status = DelayBoundStatus::kUndefined;
      res.failing_vertex = vertices[k];
      res.h_max = 0.0;
      res.diagnosis = "LMI not feasible at h = 0 for vertex " + format_complex(vertices[k]);
      return res;
    }
  }

  res.h_max = std::numeric_limits<double>::infinity();
  for (const auto& vb : res.per_vertex) res.h_max = std::min(res.h_max, vb.h_feasible);
  const bool unbounded = std::all_of(res.per_vertex.begin(), res.per_vertex.end(),
                                     [](const VertexBound& vb) { return std::isinf(vb.h_infeasible); });
  res.status = unbounded ? DelayBoundStatus::kUnbounded : DelayBoundStatus::kBounded;

  const auto check = robust_sync_check(model, K, vertices, res.h_max, options.analysis);
  std::ostringstream diag;
  diag << "h_max = " << res.h_max << " (re-verification at h_max: " << to_string(check.outcome)
       << ")";
  if (unbounded) diag << "; feasible up to the cap " << options.h_cap << " s at every vertex";
  res.diagnosis = diag.str();
  return res;
}

DsrEstimate estimate_dsr(const AgentModel& model, const Eigen::MatrixXd& K, double h, double delta,
                         const DsrOptions& options) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("estimate_dsr: delta must be positive");
  }
  if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("estimate_dsr: h must be >= 0");

  DsrEstimate est;
  est.h = h;
  est.K = K;
  est.delta = delta;
  GridProbe grid(model, K, h, delta, options.analysis);
  const int w = grid.width();

  // Smallest feasible real part on the real axis.
  int i0 = -1;
  for (int base = 0; base <= options.start_cap_steps && i0 < 0; base += w) {
    std::vector<std::pair<int, int>> batch;
    for (int k = base; k < base + w && k <= options.start_cap_steps; ++k) batch.push_back({k, 0});
    grid.ensure(batch);
    for (const auto& [i, j] : batch) {
      if (grid.feasible(i, j)) {
        i0 = i;
        break;
      }
    }
  }
  if (i0 < 0) {
    est.probes = grid.probes();
    est.inconclusive_probes = grid.inconclusive();
    std::ostringstream os;
    os << "no feasible point on the real axis in [0, " << options.start_cap_steps * delta
       << "] with step " << delta;
    est.diagnosis = os.str();
    return est;
  }

  int best_j = 0;
  std::vector<std::pair<int, int>> recorded{{i0, 0}};

  // Largest j' >= j with every point (i, j..j') feasible.
  auto climb = [&](int i, int j) {
    for (;;) {
      std::vector<std::pair<int, int>> batch;
      for (int k = 1; k <= w; ++k) {
        if (j + k > best_j + options.climb_cap_steps) break;
        batch.push_back({i, j + k});
      }
      if (batch.empty()) {
        est.truncated = true;
        return j;
      }
      grid.ensure(batch);
      for (const auto& p : batch) {
        if (!grid.feasible(p.first, p.second)) return j;
        j = p.second;
        best_j = std::max(best_j, j);
      }
    }
  };

  // Largest i' >= i with every point (i..i', j) feasible.
  auto advance = [&](int i, int j) {
    for (;;) {
      std::vector<std::pair<int, int>> batch;
      for (int k = 1; k <= w; ++k) {
        if (i + k - i0 > options.column_cap_steps) break;
        batch.push_back({i + k, j});
      }
      if (batch.empty()) {
        est.truncated = true;
        return i;
      }
      grid.ensure(batch);
      for (const auto& p : batch) {
        if (!grid.feasible(p.first, p.second)) return i;
        i = p.first;
      }
    }
  };

  // Upper boundary: climb in each column, move right while the row allows.
  int i = i0;
  int j = 0;
  for (;;) {
    j = climb(i, j);
    recorded.push_back({i, j});
    if (i + 1 - i0 > options.column_cap_steps) {
      est.truncated = true;
      break;
    }
    if (!grid.feasible(i + 1, j)) break;
    ++i;
  }
  // Right boundary: descend row by row, pushing right as far as feasible.
  while (j >= 0) {
    i = advance(i, j);
    recorded.push_back({i, j});
    --j;
    if (j >= 0 && !grid.feasible(i, j)) break;
  }

  std::sort(recorded.begin(), recorded.end());
  recorded.erase(std::unique(recorded.begin(), recorded.end()), recorded.end());

  // Independent re-verification of every candidate vertex.
  std::vector<char> verified(recorded.size(), 0);
  parallel_for(recorded.size(), options.analysis.jobs, [&](std::size_t k) {
    const auto [a, b] = recorded[k];
    const auto r = check_feasible(analysis_lmi(model, K, grid.point(a, b), h),
                                  options.analysis.feasibility);
    verified[k] = r.verdict == Feasibility::kFeasible ? 1 : 0;
  });
  int dropped = 0;
  for (std::size_t k = 0; k < recorded.size(); ++k) {
    if (verified[k]) {
      est.boundary_vertices.push_back(grid.point(recorded[k].first, recorded[k].second));
    } else {
      ++dropped;
    }
  }
  est.probes = grid.probes() + static_cast<int>(recorded.size());
  est.inconclusive_probes = grid.inconclusive();
  if (est.boundary_vertices.empty()) {
    est.diagnosis = "no traced vertex survived re-verification";
    return est;
  }
  est.hull = convex_hull(conjugate_closure(est.boundary_vertices));
  est.empty = false;
  std::ostringstream os;
  os << est.boundary_vertices.size() << " vertices, " << est.hull.size() << " hull corners, "
     << est.probes << " probes";
  if (dropped > 0) os << ", " << dropped << " candidates failed re-verification";
  if (est.truncated) os << ", trace truncated by grid cap";
  est.diagnosis = os.str();
  return est;
}

bool point_in_hull(std::span<const Complex> hull, Complex z) {
  return point_in_convex_polygon(hull, z, 1e-9);
}

}  // namespace delaysync
