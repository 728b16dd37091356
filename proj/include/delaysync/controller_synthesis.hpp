#pragma once

// State-feedback synthesis: a common-functional design over all eigenvalue
// vertices, and a single-point design scaled into its traced region by a
// coupling gain c.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/delay_analysis.hpp"

namespace delaysync {

enum class DesignMethod { kCommonLkf, kScaled };

std::string_view to_string(DesignMethod method);

struct CouplingOptions {
  double lower_probe = 1e-3;
  double upper_probe = 1e3;
  double tolerance = 1e-3;
};

/// Interval of c > 0 with every c * lambda inside the region. Ends are the
/// valid side of each bisection bracket.
struct CouplingRange {
  bool empty = true;
  double c_min = 0.0;
  double c_max = 0.0;
  /// The interval reaches a probe bound (c_min is then the lower probe).
  bool lower_at_probe = false;
  bool upper_at_probe = false;
  /// First eigenvalue that leaves the region at c = 1, when there is one.
  std::optional<Complex> offending;
};

CouplingRange coupling_range(std::span<const Complex> hull, std::span<const Complex> eigenvalues,
                             const CouplingOptions& options = {});

struct Certificate {
  DesignMethod method = DesignMethod::kCommonLkf;
  double h = 0.0;
  double epsilon = 0.0;
  /// Points the gain was designed or certified for.
  std::vector<Complex> vertices;
  /// Region estimate used to place c * lambda (scaled design only).
  std::vector<Complex> hull;
  double delta = 0.0;
  /// Design point of the scaled method.
  double sigma_r = 0.0;
};

struct ControllerDesign {
  Eigen::MatrixXd base_gain;
  double c = 1.0;
  CouplingRange range;
  Certificate certificate;

  Eigen::MatrixXd gain() const { return c * base_gain; }
};

enum class DesignStatus {
  kDesigned,
  /// The design LMI has no solution (an expected mathematical outcome).
  kInfeasible,
  /// The traced region admits no coupling gain.
  kEmptyRange,
  /// Solver could not decide, or the gain failed independent re-verification.
  kInconclusive,
};

std::string_view to_string(DesignStatus status);

struct DesignOutcome {
  DesignStatus status = DesignStatus::kInconclusive;
  std::optional<ControllerDesign> design;
  std::string diagnosis;
};

struct SynthesisOptions {
  DsrOptions dsr;
  CouplingOptions coupling;
};

/// K = Xbar inv(Ybar) from the descriptor LMI stacked over all vertices with
/// shared blocks; returned only after robust_sync_check certifies K at h.
DesignOutcome design_common_lkf(const AgentModel& model, std::span<const Complex> vertices,
                                double h, double epsilon, const SynthesisOptions& options = {});

/// (min Re lambda + max Re lambda) / 2.
double design_point(const PinnedSpectrum& spectrum);

/// Base gain at the real design point followed by scale_into_region().
DesignOutcome design_scaled(const AgentModel& model, const PinnedSpectrum& spectrum, double h,
                            double epsilon, double delta, const SynthesisOptions& options = {});

/// Traces the region of a given base gain at h, computes the coupling range
/// of the spectrum, picks c = 1 when admissible (else the interval midpoint)
/// and certifies c * base_gain.
DesignOutcome scale_into_region(const AgentModel& model, const PinnedSpectrum& spectrum,
                                const Eigen::MatrixXd& base_gain, double h, double delta,
                                const SynthesisOptions& options = {});

/// Optional post-step for a common-functional design: trace the region of its
/// gain and report the coupling range it tolerates (c stays at 1).
DesignOutcome widen_with_coupling(const AgentModel& model, const PinnedSpectrum& spectrum,
                                  const ControllerDesign& design, double delta,
                                  const SynthesisOptions& options = {});

}  // namespace delaysync
