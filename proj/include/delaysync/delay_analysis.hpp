#pragma once

// Analysis layer: robust synchronization checks over convex sets of
// eigenvalues, the allowable delay bound, and the traced estimate of the
// delay-dependent synchronizing region (DSR).

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/graph_topology.hpp"
#include "delaysync/lmi_builder.hpp"
#include "delaysync/sdp_feasibility.hpp"

namespace delaysync {

struct AnalysisOptions {
  FeasibilityOptions feasibility;
  /// Worker count for batch solves; 0 selects the hardware concurrency.
  int jobs = 0;
};

enum class SyncOutcome { kCertified, kNotCertified, kIndeterminate };

std::string_view to_string(SyncOutcome outcome);

struct VertexVerdict {
  Complex sigma;
  Feasibility verdict = Feasibility::kInconclusive;
  double slack = 0.0;
};

struct RobustCheck {
  SyncOutcome outcome = SyncOutcome::kIndeterminate;
  std::vector<VertexVerdict> vertices;

  bool certified() const { return outcome == SyncOutcome::kCertified; }
};

/// The delay-dependent LMI at a single point sigma for gain K.
LmiProblem analysis_lmi(const AgentModel& model, const Eigen::MatrixXd& K, Complex sigma, double h);

/// Feasibility of the delay-dependent LMI with A_d = -B K at every given
/// vertex, each with its own functional. Any infeasible vertex gives
/// kNotCertified; otherwise any inconclusive vertex gives kIndeterminate.
RobustCheck robust_sync_check(const AgentModel& model, const Eigen::MatrixXd& K,
                              std::span<const Complex> vertices, double h,
                              const AnalysisOptions& options = {});

/// Same over the vertices of the convex hull of the spectrum.
RobustCheck robust_sync_check(const AgentModel& model, const Eigen::MatrixXd& K,
                              const PinnedSpectrum& spectrum, double h,
                              const AnalysisOptions& options = {});

enum class DelayBoundStatus {
  kBounded,
  /// Feasible up to the cap at every vertex.
  kUnbounded,
  /// Infeasible (or undecided) already at h = 0 for some vertex.
  kUndefined,
};

std::string_view to_string(DelayBoundStatus status);

struct VertexBound {
  Complex vertex;
  /// Largest h at which feasibility was confirmed.
  double h_feasible = 0.0;
  /// Smallest h found infeasible (or undecided); +inf when unbounded.
  double h_infeasible = 0.0;
};

struct DelayBoundResult {
  DelayBoundStatus status = DelayBoundStatus::kUndefined;
  double h_max = 0.0;
  double tolerance = 0.0;
  double h_cap = 0.0;
  std::vector<VertexBound> per_vertex;
  /// Vertex responsible for kUndefined.
  std::optional<Complex> failing_vertex;
  /// Probes that returned inconclusive (counted as not feasible).
  int inconclusive_probes = 0;
  std::string diagnosis;
};

struct DelayBoundOptions {
  AnalysisOptions analysis;
  double h_cap = 100.0;
};

/// Largest h with the LMI feasible at every vertex, by bracket doubling from
/// h = tol and bisection to width tol. Throws std::invalid_argument for
/// tol <= 0 or an empty vertex list.
DelayBoundResult max_delay_bound(const AgentModel& model, const Eigen::MatrixXd& K,
                                 std::span<const Complex> vertices, double tol,
                                 const DelayBoundOptions& options = {});

struct DsrOptions {
  AnalysisOptions analysis;
  /// Start search: gamma = 0, delta, ..., start_cap_steps * delta.
  int start_cap_steps = 100;
  /// Imaginary steps allowed above the largest feasible imaginary part seen.
  int climb_cap_steps = 50;
  /// Real steps allowed to the right of the start point.
  int column_cap_steps = 400;
};

struct DsrEstimate {
  double h = 0.0;
  Eigen::MatrixXd K;
  double delta = 0.0;
  /// Verified-feasible grid points in the closed upper-right quadrant.
  std::vector<Complex> boundary_vertices;
  /// Convex hull of the vertices and their conjugates, counterclockwise.
  std::vector<Complex> hull;
  bool empty = true;
  /// A grid cap stopped the trace.
  bool truncated = false;
  int probes = 0;
  int inconclusive_probes = 0;
  std::string diagnosis;
};

/// Boundary trace on the delta-grid of the upper half-plane. Throws
/// std::invalid_argument for delta <= 0 or h < 0.
DsrEstimate estimate_dsr(const AgentModel& model, const Eigen::MatrixXd& K, double h, double delta,
                         const DsrOptions& options = {});

/// Boundary counts as inside (tolerance 1e-9).
bool point_in_hull(std::span<const Complex> hull, Complex z);

}  // namespace delaysync
