// Command-line front end: delay-bound, dsr, design, simulate, audit.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delaysync/controller_synthesis.hpp"
#include "delaysync/dde_simulator.hpp"
#include "delaysync/delay_analysis.hpp"
#include "delaysync/graph_topology.hpp"
#include "delaysync/io/config.hpp"
#include "delaysync/io/report.hpp"
#include "delaysync/io/svg.hpp"
#include "delaysync/kernels.hpp"
#include "delaysync/parallel.hpp"
#include "delaysync/spectral_oracle.hpp"

#ifndef DELAYSYNC_VERSION
#define DELAYSYNC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace delaysync;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kInfeasible = 2,
  kValidation = 3,
  kInconclusive = 4,
  kGraphCondition = 5,
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = "delaysync-out";
  int jobs = 0;
  std::optional<double> tolerance;
  std::optional<double> delta;
  std::optional<double> h;
  std::vector<double> sweep;
  std::optional<double> epsilon;
  std::optional<std::string> method;
  bool eps_scan = false;
  bool widen = false;
  std::optional<std::string> design_path;
  std::optional<double> tau;
  std::vector<double> tau_sweep;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_final;
  std::optional<double> dt;
};

// Everything a command needs, plus the manifest it fills in.
struct Run {
  Options opt;
  io::Config cfg;
  io::RunManifest manifest;

  std::string out(const std::string& name) {
    const std::string p = (fs::path(opt.out_dir) / name).string();
    manifest.outputs.push_back(p);
    return p;
  }
  AnalysisOptions analysis() const {
    AnalysisOptions a;
    a.jobs = opt.jobs;
    return a;
  }
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt(Complex z) {
  std::ostringstream os;
  os << fmt(z.real()) << (z.imag() < 0 ? " - " : " + ") << fmt(std::abs(z.imag())) << "i";
  return os.str();
}

std::string tag(double v) { return fmt(v, "%.4g"); }

std::string matrix_text(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) os << "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << fmt(m(i, j));
  }
  os << "]";
  return os.str();
}

const PinnedDigraph& require_graph(const Run& run) {
  if (!run.cfg.graph) throw ValidationError("config has no [graph] section");
  return *run.cfg.graph;
}

PinnedSpectrum spectrum_of(const Run& run) {
  return pinned_spectrum(build_pinned_laplacian(require_graph(run)));
}

std::optional<ControllerDesign> load_design(const Run& run) {
  if (!run.opt.design_path) return std::nullopt;
  ControllerDesign d;
  try {
    d = io::design_from_json(io::read_text(*run.opt.design_path));
  } catch (const std::runtime_error& ex) {
    throw ValidationError(ex.what());
  }
  if (d.base_gain.rows() != run.cfg.model.m() || d.base_gain.cols() != run.cfg.model.n()) {
    throw ValidationError("design gain dimensions do not match the model");
  }
  return d;
}

Eigen::MatrixXd require_gain(const Run& run) {
  if (auto d = load_design(run)) return d->gain();
  if (!run.cfg.gain) throw ValidationError("no gain: give model.K in the config or --design");
  return *run.cfg.gain;
}

double positive_or_throw(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
  return v;
}

// ---------------------------------------------------------------------------

int cmd_delay_bound(Run& run) {
  const double tol = positive_or_throw(run.opt.tolerance.value_or(run.cfg.analysis.tolerance),
                                       "tolerance");
  const Eigen::MatrixXd K = require_gain(run);
  const auto spectrum = spectrum_of(run);
  const auto hull = eigenvalue_hull(spectrum);
  DelayBoundOptions dopt;
  dopt.analysis = run.analysis();
  dopt.h_cap = run.cfg.analysis.h_cap;
  const auto res = max_delay_bound(run.cfg.model, K, hull, tol, dopt);

  std::printf("gain K = %s\n", matrix_text(K).c_str());
  for (const auto& v : res.per_vertex) {
    std::printf("  vertex %-24s feasible up to %s, infeasible at %s\n", fmt(v.vertex).c_str(),
                fmt(v.h_feasible).c_str(), fmt(v.h_infeasible).c_str());
  }
  std::vector<std::vector<double>> rows;
  for (const auto& v : res.per_vertex) {
    rows.push_back({v.vertex.real(), v.vertex.imag(), v.h_feasible, v.h_infeasible});
  }
  io::write_csv(run.out("delay_bound.csv"), {"vertex_re", "vertex_im", "h_feasible", "h_infeasible"},
                rows);
  run.manifest.verdicts["delay_bound"] = std::string(to_string(res.status));
  run.manifest.verdicts["h_max"] = fmt(res.h_max, "%.17g");
  if (res.inconclusive_probes > 0) {
    std::printf("warning: %d inconclusive solver probes were counted as infeasible\n",
                res.inconclusive_probes);
  }
  switch (res.status) {
    case DelayBoundStatus::kUndefined:
      std::printf("h_max undefined: %s\n", res.diagnosis.c_str());
      return kInfeasible;
    case DelayBoundStatus::kUnbounded:
      std::printf("h_max unbounded (feasible up to the cap %s s)\n", fmt(res.h_cap).c_str());
      return kOk;
    case DelayBoundStatus::kBounded:
      std::printf("h_max = %s ± %s\n", fmt(res.h_max, "%.4f").c_str(), fmt(tol).c_str());
      return kOk;
  }
  return kInternal;
}

int cmd_dsr(Run& run) {
  const double delta = positive_or_throw(run.opt.delta.value_or(run.cfg.analysis.delta), "delta");
  std::vector<double> hs = !run.opt.sweep.empty() ? run.opt.sweep : run.cfg.analysis.sweep;
  if (hs.empty()) {
    const auto h = run.opt.h ? run.opt.h : run.cfg.analysis.h;
    if (!h) throw ValidationError("no delay bound: set analysis.h, analysis.sweep, --delay or --sweep");
    hs.push_back(*h);
  }
  for (double h : hs) {
    if (!(h >= 0.0)) throw ValidationError("delay bounds must be nonnegative");
  }
  const Eigen::MatrixXd K = require_gain(run);
  const auto spectrum = spectrum_of(run);
  DsrOptions dopt;
  dopt.analysis = run.analysis();

  std::vector<io::RegionLayer> layers;
  bool any_empty = false;
  for (double h : hs) {
    const auto est = estimate_dsr(run.cfg.model, K, h, delta, dopt);
    const std::string key = "h=" + tag(h);
    run.manifest.verdicts["dsr " + key] = est.empty ? "empty" : "nonempty";
    std::printf("h = %s, delta = %s: %s\n", tag(h).c_str(), tag(delta).c_str(), est.diagnosis.c_str());
    if (est.empty) {
      any_empty = true;
      continue;
    }
    std::vector<std::vector<double>> hull_rows, vertex_rows;
    for (const auto& z : est.hull) hull_rows.push_back({z.real(), z.imag()});
    for (const auto& z : est.boundary_vertices) vertex_rows.push_back({z.real(), z.imag()});
    io::write_csv(run.out("dsr_hull_h" + tag(h) + ".csv"), {"re", "im"}, hull_rows);
    io::write_csv(run.out("dsr_vertices_h" + tag(h) + ".csv"), {"re", "im"}, vertex_rows);
    for (const auto& lambda : spectrum.eigenvalues) {
      const bool inside = point_in_hull(est.hull, lambda);
      std::printf("  lambda %-24s %s (distance to boundary %s)\n", fmt(lambda).c_str(),
                  inside ? "inside " : "outside", fmt(distance_to_boundary(est.hull, lambda)).c_str());
    }
    layers.push_back({"h = " + tag(h), est.hull, est.boundary_vertices});
  }
  if (!layers.empty()) {
    io::write_text(run.out("dsr.svg"),
                   io::region_svg(layers, spectrum.eigenvalues, "Synchronizing region estimates"));
  }
  if (any_empty) {
    std::printf("empty region: no feasible grid point on the real axis (try a smaller delta)\n");
    return kInfeasible;
  }
  return kOk;
}

struct DesignRequest {
  std::string method;
  double h;
  double epsilon;
  double delta;
};

DesignOutcome run_design(const Run& run, const DesignRequest& req, const PinnedSpectrum& spectrum) {
  SynthesisOptions sopt;
  sopt.dsr.analysis = run.analysis();
  if (req.method == "common") {
    const auto hull = eigenvalue_hull(spectrum);
    auto out = design_common_lkf(run.cfg.model, hull, req.h, req.epsilon, sopt);
    if (out.design && (run.opt.widen || run.cfg.design.widen_coupling)) {
      auto wide = widen_with_coupling(run.cfg.model, spectrum, *out.design, req.delta, sopt);
      if (wide.design) {
        out.design = wide.design;
        out.diagnosis += "; " + wide.diagnosis;
      } else {
        out.diagnosis += "; coupling post-step: " + wide.diagnosis;
      }
    }
    return out;
  }
  return design_scaled(run.cfg.model, spectrum, req.h, req.epsilon, req.delta, sopt);
}

int design_exit(DesignStatus s) {
  switch (s) {
    case DesignStatus::kDesigned:
      return kOk;
    case DesignStatus::kInfeasible:
    case DesignStatus::kEmptyRange:
      return kInfeasible;
    case DesignStatus::kInconclusive:
      return kInconclusive;
  }
  return kInternal;
}

int cmd_design(Run& run) {
  DesignRequest req;
  req.method = run.opt.method.value_or(run.cfg.design.method);
  if (req.method != "common" && req.method != "scaled") {
    throw ValidationError("--method must be 'common' or 'scaled'");
  }
  const auto h = run.opt.h ? run.opt.h : run.cfg.design.h;
  if (!h) throw ValidationError("no design delay bound: set design.h or --delay");
  req.h = positive_or_throw(*h, "design h");
  req.epsilon = positive_or_throw(run.opt.epsilon.value_or(run.cfg.design.epsilon), "epsilon");
  req.delta = positive_or_throw(run.opt.delta.value_or(run.cfg.design.delta), "delta");
  const auto spectrum = spectrum_of(run);

  const auto outcome = run_design(run, req, spectrum);
  run.manifest.verdicts["design"] = std::string(to_string(outcome.status));
  std::printf("%s design at h = %s, epsilon = %s: %s\n", req.method.c_str(), tag(req.h).c_str(),
              tag(req.epsilon).c_str(), std::string(to_string(outcome.status)).c_str());
  std::printf("  %s\n", outcome.diagnosis.c_str());
  if (outcome.design) {
    const auto& d = *outcome.design;
    std::printf("  base gain %s, c = %s, K = %s\n", matrix_text(d.base_gain).c_str(),
                fmt(d.c).c_str(), matrix_text(d.gain()).c_str());
    if (!d.range.empty && d.range.c_max > d.range.c_min) {
      std::printf("  admissible c in [%s, %s]\n", fmt(d.range.c_min).c_str(), fmt(d.range.c_max).c_str());
    }
    io::write_text(run.out("design.json"), io::design_to_json(d));
  }

  if (run.opt.eps_scan || !run.cfg.design.epsilon_scan.empty()) {
    std::vector<double> grid = run.cfg.design.epsilon_scan;
    if (grid.empty()) grid = {0.01, 0.1, 1.0};
    const double tol = positive_or_throw(run.opt.tolerance.value_or(run.cfg.analysis.tolerance),
                                         "tolerance");
    const auto hull = eigenvalue_hull(spectrum);
    std::vector<std::vector<double>> rows;
    std::printf("  epsilon      status        h_max of designed gain\n");
    for (double eps : grid) {
      DesignRequest r = req;
      r.epsilon = eps;
      const auto o = run_design(run, r, spectrum);
      double hmax = std::nan("");
      if (o.design) {
        DelayBoundOptions dopt;
        dopt.analysis = run.analysis();
        dopt.h_cap = run.cfg.analysis.h_cap;
        const auto b = max_delay_bound(run.cfg.model, o.design->gain(), hull, tol, dopt);
        if (b.status != DelayBoundStatus::kUndefined) hmax = b.h_max;
      }
      std::printf("  %-12s %-13s %s\n", tag(eps).c_str(), std::string(to_string(o.status)).c_str(),
                  std::isnan(hmax) ? "-" : fmt(hmax).c_str());
      rows.push_back({eps, o.design ? 1.0 : 0.0, hmax});
    }
    io::write_csv(run.out("eps_scan.csv"), {"epsilon", "designed", "h_max"}, rows);
  }
  return design_exit(outcome.status);
}

int cmd_simulate(Run& run) {
  const auto& sim = run.cfg.simulation;
  const auto design = load_design(run);
  const Eigen::MatrixXd K = require_gain(run);
  const auto& graph = require_graph(run);
  std::vector<double> taus = !run.opt.tau_sweep.empty() ? run.opt.tau_sweep : sim.tau_sweep;
  if (run.opt.tau) taus = {*run.opt.tau};
  if (taus.empty()) {
    if (sim.tau) {
      taus = {*sim.tau};
    } else if (design) {
      taus = {design->certificate.h};
    } else {
      throw ValidationError("no delay: set simulation.tau, --tau or --tau-sweep");
    }
  }
  for (double t : taus) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("tau must be finite and >= 0");
  }
  if (!sim.leader_x0) throw ValidationError("simulation.leader_x0 is required");
  const std::uint64_t seed = run.opt.seed.value_or(sim.seed);
  std::vector<Eigen::VectorXd> agents = sim.agent_x0;
  if (agents.empty()) {
    agents = random_initial_states(graph.n_agents(), run.cfg.model.n(), sim.random_low,
                                   sim.random_high, seed);
  }
  run.manifest.verdicts["seed"] = std::to_string(seed);

  const double t_final = positive_or_throw(run.opt.t_final.value_or(sim.t_final), "t_final");
  const double dt = positive_or_throw(run.opt.dt.value_or(sim.dt), "dt");
  std::vector<SimulationConfig> configs;
  for (double tau : taus) {
    SimulationConfig cfg{.model = run.cfg.model,
                         .graph = graph,
                         .K = K,
                         .tau = tau,
                         .leader_x0 = *sim.leader_x0,
                         .agent_x0 = agents,
                         .t_final = t_final,
                         .dt = dt,
                         .agent_history = {}};
    try {
      cfg.validate();
    } catch (const std::invalid_argument& ex) {
      throw ValidationError(ex.what());
    }
    configs.push_back(std::move(cfg));
  }
  std::vector<Trajectory> runs(configs.size());
  parallel_for(configs.size(), run.opt.jobs, [&](std::size_t i) { runs[i] = simulate(configs[i]); });

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double tau = taus[r];
    const auto& tr = runs[r];
    const int n = run.cfg.model.n();
    std::vector<std::string> header{"t"};
    for (int k = 0; k < n; ++k) header.push_back("leader_x" + std::to_string(k + 1));
    for (int a = 0; a < graph.n_agents(); ++a)
      for (int k = 0; k < n; ++k)
        header.push_back("agent" + std::to_string(a + 1) + "_x" + std::to_string(k + 1));
    header.push_back("sync_error_norm");
    std::vector<std::vector<double>> rows;
    const std::size_t T = tr.times.size();
    for (std::size_t k = 0; k < T; k += sim.csv_stride) {
      std::vector<double> row{tr.times[k]};
      for (int c = 0; c < n; ++c) row.push_back(tr.leader_states(k, c));
      for (const auto& a : tr.agent_states)
        for (int c = 0; c < n; ++c) row.push_back(a(k, c));
      row.push_back(tr.sync_error_norm(k));
      rows.push_back(std::move(row));
      if (k + sim.csv_stride >= T && k != T - 1) k = T - 1 - sim.csv_stride;
    }
    io::write_csv(run.out("trajectory_tau" + tag(tau) + ".csv"), header, rows);
    io::write_text(run.out("trajectory_tau" + tag(tau) + ".svg"),
                   io::trajectory_svg(tr, "Leader and agent states, tau = " + tag(tau) + " s"));
    const double final_err = tr.sync_error_norm(T - 1);
    const double max_err = tr.sync_error_norm.maxCoeff();
    const double scale = std::max(1.0, tr.sync_error_norm(0));
    std::string status = tr.diverged                   ? "diverged"
                         : final_err < 1e-2 * scale    ? "converged"
                         : final_err < 0.1 * max_err   ? "decaying"
                                                       : "not converging";
    run.manifest.verdicts["simulate tau=" + tag(tau)] = status;
    std::printf("tau = %s s (dt %s): ||delta(%s)|| = %s, max %s -> %s\n", tag(tau).c_str(),
                fmt(tr.dt).c_str(), fmt(tr.times.back()).c_str(), fmt(final_err).c_str(),
                fmt(max_err).c_str(), status.c_str());
  }
  return kOk;
}

int cmd_audit(Run& run) {
  const double tol = positive_or_throw(run.opt.tolerance.value_or(run.cfg.analysis.tolerance),
                                       "tolerance");
  const Eigen::MatrixXd K = require_gain(run);
  const auto spectrum = spectrum_of(run);
  const auto hull = eigenvalue_hull(spectrum);
  const Eigen::MatrixXd Ad = run.cfg.model.delay_matrix(K);

  if (Ad.cwiseAbs().maxCoeff() == 0.0) {
    const auto check = robust_sync_check(run.cfg.model, K, hull, 0.0, run.analysis());
    std::printf("delay-independent: the delayed coupling B K is zero; the network is %s\n",
                check.certified() ? "stable for every delay" : "not certified even without delay");
    run.manifest.verdicts["audit"] = "delay-independent";
    return kOk;
  }

  DelayBoundOptions dopt;
  dopt.analysis = run.analysis();
  dopt.h_cap = run.cfg.analysis.h_cap;
  const auto lkf = max_delay_bound(run.cfg.model, K, hull, tol, dopt);
  MarginOptions mopt;
  mopt.jobs = run.opt.jobs;
  const auto oracle = true_delay_margin(run.cfg.model, Ad, spectrum.eigenvalues,
                                        std::min(tol, 1e-4), mopt);

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
    const auto z = spectrum.eigenvalues[k];
    rows.push_back({z.real(), z.imag(), oracle.per_sigma[k], static_cast<double>(oracle.per_sigma_unbounded[k])});
    std::printf("  lambda %-24s oracle margin %s%s\n", fmt(z).c_str(), fmt(oracle.per_sigma[k]).c_str(),
                oracle.per_sigma_unbounded[k] ? " (no crossing up to cap)" : "");
  }
  io::write_csv(run.out("audit.csv"), {"lambda_re", "lambda_im", "oracle_margin", "unbounded"}, rows);

  if (lkf.status == DelayBoundStatus::kUndefined) {
    std::printf("LKF bound undefined: %s\n", lkf.diagnosis.c_str());
    run.manifest.verdicts["audit"] = "lkf-undefined";
    return kInfeasible;
  }
  const std::string lkf_text = lkf.status == DelayBoundStatus::kUnbounded
                                   ? ">= " + fmt(lkf.h_max) + " (cap)"
                                   : fmt(lkf.h_max, "%.4f");
  const std::string oracle_text = oracle.unbounded ? ">= " + fmt(oracle.margin) + " (cap)"
                                                   : fmt(oracle.margin, "%.4f");
  std::printf("LKF h_max = %s, oracle tau_m = %s", lkf_text.c_str(), oracle_text.c_str());
  const double gap = oracle.margin - lkf.h_max;
  if (lkf.status == DelayBoundStatus::kBounded && !oracle.unbounded) {
    std::printf(", gap = %s\n", fmt(gap, "%.4f").c_str());
  } else {
    std::printf("\n");
  }
  run.manifest.verdicts["lkf_h_max"] = fmt(lkf.h_max, "%.17g");
  run.manifest.verdicts["oracle_tau_m"] = fmt(oracle.margin, "%.17g");
  run.manifest.verdicts["gap"] = fmt(gap, "%.17g");
  if (lkf.h_max > oracle.margin + tol) {
    std::printf("warning: LKF bound exceeds the oracle margin\n");
  }
  return kOk;
}

int dispatch(Run& run) {
  if (run.opt.command == "delay-bound") return cmd_delay_bound(run);
  if (run.opt.command == "dsr") return cmd_dsr(run);
  if (run.opt.command == "design") return cmd_design(run);
  if (run.opt.command == "simulate") return cmd_simulate(run);
  if (run.opt.command == "audit") return cmd_audit(run);
  throw ValidationError("unknown command " + run.opt.command);
}

void write_manifest(Run& run, double seconds, int code) {
  if (run.opt.out_dir.empty()) return;
  try {
    fs::create_directories(run.opt.out_dir);
    run.manifest.command = run.opt.command;
    run.manifest.config_path = run.opt.config_path;
    run.manifest.tool_version = DELAYSYNC_VERSION;
    run.manifest.wall_clock_seconds = seconds;
    run.manifest.exit_code = code;
    const sdp::Settings s;
    run.manifest.solver_settings = {
        {"solver_tolerance", s.tolerance},
        {"solver_max_iterations", static_cast<double>(s.max_iterations)},
        {"max_condition", FeasibilityOptions{}.max_condition},
        {"jobs", static_cast<double>(run.opt.jobs)},
    };
    if (run.cfg.model.n() > 0) {
      run.manifest.solver_settings["margin"] = feasibility_margin(run.cfg.model);
    }
    run.manifest.verdicts["kernel_isa"] = std::string(kernels::to_string(kernels::active_isa()));
    const std::string path = (fs::path(run.opt.out_dir) / "manifest.json").string();
    run.manifest.outputs.push_back(path);
    io::write_text(path, io::manifest_to_json(run.manifest));
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "warning: could not write manifest: %s\n", ex.what());
  }
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "YAML configuration file")->required();
  sub->add_option("--out-dir", opt.out_dir, "directory for result files")->capture_default_str();
  sub->add_option("--jobs", opt.jobs, "worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-robust synchronization analysis and design for leader-follower networks"};
  app.set_version_flag("--version", DELAYSYNC_VERSION);
  app.require_subcommand(1);
  Options opt;

  auto* bound = app.add_subcommand("delay-bound", "largest delay certified by the LMI");
  add_common(bound, opt);
  bound->add_option("--tolerance", opt.tolerance, "bisection width in seconds");
  bound->add_option("--design", opt.design_path, "design file providing the gain");

  auto* dsr = app.add_subcommand("dsr", "trace the delay-dependent synchronizing region");
  add_common(dsr, opt);
  dsr->add_option("--delta", opt.delta, "grid step");
  dsr->add_option("--delay", opt.h, "delay bound");
  dsr->add_option("--sweep", opt.sweep, "several delay bounds, one region each")->delimiter(',');
  dsr->add_option("--design", opt.design_path, "design file providing the gain");

  auto* design = app.add_subcommand("design", "synthesize a feedback gain");
  add_common(design, opt);
  design->add_option("--method", opt.method, "common | scaled");
  design->add_option("--delay", opt.h, "delay bound to design for");
  design->add_option("--epsilon", opt.epsilon, "descriptor tuning scalar");
  design->add_option("--delta", opt.delta, "region grid step (scaled method)");
  design->add_option("--tolerance", opt.tolerance, "bisection width for --eps-scan");
  design->add_flag("--eps-scan", opt.eps_scan, "scan epsilon and report the delay bound of each gain");
  design->add_flag("--widen", opt.widen, "after a common design, report its coupling range");

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate the delayed network");
  add_common(simulate_cmd, opt);
  simulate_cmd->add_option("--design", opt.design_path, "design file providing the gain");
  simulate_cmd->add_option("--tau", opt.tau, "delay in seconds");
  simulate_cmd->add_option("--tau-sweep", opt.tau_sweep, "several delays")->delimiter(',');
  simulate_cmd->add_option("--seed", opt.seed, "seed for random agent initial states");
  simulate_cmd->add_option("--t-final", opt.t_final, "horizon in seconds");
  simulate_cmd->add_option("--dt", opt.dt, "step in seconds");

  auto* audit = app.add_subcommand("audit", "compare the LMI bound with the exact delay margin");
  add_common(audit, opt);
  audit->add_option("--design", opt.design_path, "design file providing the gain");
  audit->add_option("--tolerance", opt.tolerance, "bisection width in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  for (auto* sub : app.get_subcommands()) opt.command = sub->get_name();

  Run run;
  run.opt = opt;
  for (int i = 1; i < argc; ++i) run.manifest.arguments.emplace_back(argv[i]);
  const auto start = std::chrono::steady_clock::now();
  int code = kInternal;
  try {
    run.cfg = io::load_config(opt.config_path);
    run.manifest.config_snapshot = io::to_yaml(run.cfg);
    fs::create_directories(opt.out_dir);
    if (run.cfg.graph && !has_pinned_spanning_tree(*run.cfg.graph)) {
      std::fprintf(stderr,
                   "error: the graph has no spanning tree rooted at a pinned agent; "
                   "the leader cannot reach every agent\n");
      code = kGraphCondition;
    } else {
      code = dispatch(run);
    }
  } catch (const io::ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    code = kValidation;
  } catch (const ValidationError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    code = kValidation;
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    code = kValidation;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "internal error: %s\n", ex.what());
    code = kInternal;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(run, seconds, code);
  return code;
}
