#include "delaysync/controller_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace delaysync {

namespace {

bool all_inside(std::span<const Complex> hull, std::span<const Complex> eigenvalues, double c) {
  return std::all_of(eigenvalues.begin(), eigenvalues.end(),
                     [&](Complex z) { return point_in_hull(hull, c * z); });
}

// Bisect between a valid and an invalid coupling value; returns the valid end.
double bisect(std::span<const Complex> hull, std::span<const Complex> eigenvalues, double valid,
              double invalid, double tol) {
  while (std::abs(invalid - valid) > tol) {
    const double mid = 0.5 * (valid + invalid);
    (all_inside(hull, eigenvalues, mid) ? valid : invalid) = mid;
  }
  return valid;
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

Eigen::MatrixXd recover_gain(const LmiProblem& problem, const LmiWitness& witness) {
  const auto& Y = witness.blocks[problem.block_index("Ybar")];
  const auto& X = witness.blocks[problem.block_index("Xbar")];
  return Y.transpose().partialPivLu().solve(X.transpose()).transpose();
}

}  // namespace

std::string_view to_string(DesignMethod method) {
  return method == DesignMethod::kCommonLkf ? "common" : "scaled";
}

std::string_view to_string(DesignStatus status) {
  switch (status) {
    case DesignStatus::kDesigned:
      return "designed";
    case DesignStatus::kInfeasible:
      return "infeasible";
    case DesignStatus::kEmptyRange:
      return "empty-range";
    case DesignStatus::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

CouplingRange coupling_range(std::span<const Complex> hull, std::span<const Complex> eigenvalues,
                             const CouplingOptions& options) {
  if (hull.empty()) throw std::invalid_argument("coupling_range: empty hull");
  if (eigenvalues.empty()) throw std::invalid_argument("coupling_range: empty spectrum");
  if (!(options.lower_probe > 0.0 && options.upper_probe > options.lower_probe &&
        options.tolerance > 0.0)) {
    throw std::invalid_argument("coupling_range: invalid probe bounds or tolerance");
  }
  CouplingRange out;
  for (const auto& z : eigenvalues) {
    if (!point_in_hull(hull, z)) {
      out.offending = z;
      break;
    }
  }

  // The admissible set is an interval: each c*lambda ranges over a ray and
  // the region is convex.
  double seed = 1.0;
  if (out.offending) {
    constexpr int kGrid = 4000;
    const double lo = std::log(options.lower_probe);
    const double hi = std::log(options.upper_probe);
    bool found = false;
    for (int k = 0; k <= kGrid && !found; ++k) {
      const double c = std::exp(lo + (hi - lo) * k / kGrid);
      if (all_inside(hull, eigenvalues, c)) {
        seed = c;
        found = true;
      }
    }
    if (!found) return out;
  }

  out.empty = false;
  if (all_inside(hull, eigenvalues, options.upper_probe)) {
    out.c_max = options.upper_probe;
    out.upper_at_probe = true;
  } else {
    out.c_max = bisect(hull, eigenvalues, seed, options.upper_probe, options.tolerance);
  }
  if (all_inside(hull, eigenvalues, options.lower_probe)) {
    out.c_min = options.lower_probe;
    out.lower_at_probe = true;
  } else {
    out.c_min = bisect(hull, eigenvalues, seed, options.lower_probe, options.tolerance);
  }
  return out;
}

DesignOutcome design_common_lkf(const AgentModel& model, std::span<const Complex> vertices,
                                double h, double epsilon, const SynthesisOptions& options) {
  if (vertices.empty()) throw std::invalid_argument("design_common_lkf: no vertices");
  std::vector<LmiProblem> parts;
  for (const auto& v : vertices) parts.push_back(descriptor_design_lmi(model, v, h, epsilon));
  const LmiProblem stacked = common_blocks_problem(parts);
  const auto fopt = options.dsr.analysis.feasibility;
  const auto r = check_feasible(stacked, fopt);

  DesignOutcome out;
  if (r.verdict == Feasibility::kInfeasible) {
    out.status = DesignStatus::kInfeasible;
    out.diagnosis = "common design LMI infeasible at h = " + std::to_string(h) + " (" + r.detail + ")";
    return out;
  }
  if (r.verdict == Feasibility::kInconclusive) {
    out.diagnosis = "common design LMI undecided: " + r.detail;
    return out;
  }

  ControllerDesign d;
  d.base_gain = recover_gain(stacked, *r.witness);
  d.c = 1.0;
  d.range = {false, 1.0, 1.0, false, false, std::nullopt};
  d.certificate.method = DesignMethod::kCommonLkf;
  d.certificate.h = h;
  d.certificate.epsilon = epsilon;
  d.certificate.vertices.assign(vertices.begin(), vertices.end());

  const auto check = robust_sync_check(model, d.base_gain, vertices, h, options.dsr.analysis);
  if (!check.certified()) {
    out.diagnosis = "designed gain failed re-verification (" + std::string(to_string(check.outcome)) + ")";
    return out;
  }
  out.status = DesignStatus::kDesigned;
  out.design = std::move(d);
  out.diagnosis = "common design feasible; gain certified at h = " + std::to_string(h);
  return out;
}

double design_point(const PinnedSpectrum& spectrum) {
  return 0.5 * (spectrum.min_real + spectrum.max_real);
}

DesignOutcome design_scaled(const AgentModel& model, const PinnedSpectrum& spectrum, double h,
                            double epsilon, double delta, const SynthesisOptions& options) {
  if (spectrum.eigenvalues.empty()) throw std::invalid_argument("design_scaled: empty spectrum");
  const double sigma_r = design_point(spectrum);
  const LmiProblem p = descriptor_design_lmi(model, Complex(sigma_r, 0.0), h, epsilon);
  const auto r = check_feasible(p, options.dsr.analysis.feasibility);
  DesignOutcome out;
  if (r.verdict != Feasibility::kFeasible) {
    out.status = r.verdict == Feasibility::kInfeasible ? DesignStatus::kInfeasible
                                                       : DesignStatus::kInconclusive;
    out.diagnosis = "design LMI at sigma_R = " + std::to_string(sigma_r) + " " +
                    std::string(to_string(r.verdict)) + " (" + r.detail + ")";
    return out;
  }
  out = scale_into_region(model, spectrum, recover_gain(p, *r.witness), h, delta, options);
  if (out.design) {
    out.design->certificate.epsilon = epsilon;
    out.design->certificate.sigma_r = sigma_r;
  }
  return out;
}

DesignOutcome scale_into_region(const AgentModel& model, const PinnedSpectrum& spectrum,
                                const Eigen::MatrixXd& base_gain, double h, double delta,
                                const SynthesisOptions& options) {
  DesignOutcome out;
  const DsrEstimate est = estimate_dsr(model, base_gain, h, delta, options.dsr);
  if (est.empty) {
    out.status = DesignStatus::kEmptyRange;
    out.diagnosis = "region estimate is empty: " + est.diagnosis;
    return out;
  }
  const CouplingRange range = coupling_range(est.hull, spectrum.eigenvalues, options.coupling);
  if (range.empty) {
    out.status = DesignStatus::kEmptyRange;
    out.diagnosis = "no coupling gain places every eigenvalue in the region";
    if (range.offending) out.diagnosis += "; offending eigenvalue " + format_complex(*range.offending);
    return out;
  }

  ControllerDesign d;
  d.base_gain = base_gain;
  d.range = range;
  d.c = (range.c_min <= 1.0 && 1.0 <= range.c_max) ? 1.0 : 0.5 * (range.c_min + range.c_max);
  d.certificate.method = DesignMethod::kScaled;
  d.certificate.h = h;
  d.certificate.delta = delta;
  d.certificate.vertices = est.boundary_vertices;
  d.certificate.hull = est.hull;

  const auto check = robust_sync_check(model, d.gain(), spectrum, h, options.dsr.analysis);
  if (!check.certified()) {
    out.diagnosis = "scaled gain failed re-verification (" + std::string(to_string(check.outcome)) + ")";
    return out;
  }
  out.status = DesignStatus::kDesigned;
  std::ostringstream os;
  os << "c in [" << range.c_min << ", " << range.c_max << "], chosen c = " << d.c;
  if (est.truncated) os << "; region trace truncated by grid cap";
  out.diagnosis = os.str();
  out.design = std::move(d);
  return out;
}

DesignOutcome widen_with_coupling(const AgentModel& model, const PinnedSpectrum& spectrum,
                                  const ControllerDesign& design, double delta,
                                  const SynthesisOptions& options) {
  DesignOutcome out;
  const double h = design.certificate.h;
  const DsrEstimate est = estimate_dsr(model, design.gain(), h, delta, options.dsr);
  if (est.empty) {
    out.status = DesignStatus::kEmptyRange;
    out.diagnosis = "region estimate is empty: " + est.diagnosis;
    return out;
  }
  ControllerDesign d = design;
  d.range = coupling_range(est.hull, spectrum.eigenvalues, options.coupling);
  d.certificate.hull = est.hull;
  d.certificate.delta = delta;
  if (d.range.empty) {
    out.status = DesignStatus::kEmptyRange;
    out.diagnosis = "traced region does not hold the spectrum for any coupling gain";
    return out;
  }
  out.status = DesignStatus::kDesigned;
  std::ostringstream os;
  os << "gain tolerates c in [" << d.range.c_min << ", " << d.range.c_max << "]";
  out.diagnosis = os.str();
  out.design = std::move(d);
  return out;
}

}  // namespace delaysync
