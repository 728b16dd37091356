// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "delaysync/controller_synthesis.hpp"
#include "delaysync/dde_simulator.hpp"
#include "delaysync/delay_analysis.hpp"
#include "delaysync/sdp_feasibility.hpp"
#include "delaysync/spectral_oracle.hpp"
#include "test_support.hpp"

using namespace delaysync;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string str(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const AgentModel& model() {
  static const AgentModel m = testing::oscillator();
  return m;
}

const PinnedSpectrum& spectrum() {
  static const PinnedSpectrum s =
      pinned_spectrum(build_pinned_laplacian(testing::four_agent_graph()));
  return s;
}

// Shared between criteria.
double g_h_max = 0.0;
std::optional<DsrEstimate> g_region;

SimulationConfig scenario(const Eigen::MatrixXd& K, double tau, std::uint64_t seed) {
  Eigen::VectorXd leader(2);
  leader << 2, 2;
  return SimulationConfig{.model = model(),
                          .graph = testing::four_agent_graph(),
                          .K = K,
                          .tau = tau,
                          .leader_x0 = leader,
                          .agent_x0 = random_initial_states(4, 2, -2.0, 2.0, seed),
                          .t_final = 60.0,
                          .dt = 1e-3,
                          .agent_history = {}};
}

Verdict ac1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto hull = eigenvalue_hull(spectrum());
  const auto r = max_delay_bound(model(), testing::reference_gain(), hull, 1e-3);
  const double t = seconds_since(t0);
  g_h_max = r.h_max;
  v.expect(r.status == DelayBoundStatus::kBounded, "bound status " + std::string(to_string(r.status)));
  v.expect(std::abs(r.h_max - 0.4190) <= 0.005, "h_max = " + str(r.h_max) + " (0.4190 +- 0.005)");
  v.expect(t < 60.0, "runtime " + str(t, "%.2f") + " s (< 60 s)");
  return v;
}

Verdict ac2() {
  Verdict v;
  const Eigen::MatrixXd Ad = model().delay_matrix(testing::reference_gain());
  const auto m = true_delay_margin(model(), Ad, spectrum().eigenvalues, 1e-5);
  v.expect(!m.unbounded && std::abs(m.margin - 0.4445) <= 0.002,
           "oracle tau_m = " + str(m.margin) + " (0.4445 +- 0.002)");
  const Eigen::MatrixXd K = testing::reference_gain();
  double analytic = 1e9;
  for (const auto& z : spectrum().eigenvalues) {
    analytic = std::min(analytic, testing::oscillator_margin(z, K(0, 0), K(0, 1)));
  }
  v.expect(std::abs(m.margin - analytic) < 1e-4,
           "closed-form crossing margin " + str(analytic, "%.6f") + " agrees");
  v.expect(g_h_max < m.margin, "LKF bound " + str(g_h_max) + " < oracle margin");
  const double gap = m.margin - g_h_max;
  v.expect(std::abs(gap - 0.0255) <= 0.007, "gap = " + str(gap) + " (0.0255 +- 0.007)");
  v.expect(g_h_max > 0.1137, "h_max exceeds the earlier bound 0.1137");
  return v;
}

Verdict ac3() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = estimate_dsr(model(), testing::reference_gain(), 0.419, 0.05);
  const double t = seconds_since(t0);
  v.expect(!est.empty, est.diagnosis);
  if (est.empty) return v;
  g_region = est;
  const double near = 0.05 * std::sqrt(2.0);
  for (const auto& z : spectrum().eigenvalues) {
    const bool inside = point_in_hull(est.hull, z);
    const double d = distance_to_boundary(est.hull, z);
    const std::string name = "lambda " + str(z.real(), "%.3f") + (z.imag() >= 0 ? "+" : "") +
                             str(z.imag(), "%.3f") + "i";
    if (std::abs(z.imag()) < 1e-9) {
      v.expect(inside && d > 1e-6, name + " strictly inside (distance " + str(d) + ")");
    } else {
      v.expect(d <= near, name + " within delta*sqrt(2) of the boundary (distance " + str(d) + ")");
    }
  }
  v.expect(t < 600.0, "runtime " + str(t, "%.2f") + " s (< 600 s)");
  return v;
}

Verdict ac4() {
  Verdict v;
  const auto hull = eigenvalue_hull(spectrum());
  const auto common = design_common_lkf(model(), hull, 0.6, 0.1);
  v.expect(common.status == DesignStatus::kDesigned, "(a) common design at h = 0.6: " +
                                                         std::string(to_string(common.status)));
  if (common.design) {
    const Eigen::MatrixXd K = common.design->gain();
    v.expect(robust_sync_check(model(), K, hull, 0.6).certified(),
             "(a) designed K = [" + str(K(0, 0)) + " " + str(K(0, 1)) + "] certified at h = 0.6");
  }
  v.expect(robust_sync_check(model(), testing::row(-0.0173, 0.2531), hull, 0.6).certified(),
           "(a) published K = [-0.0173 0.2531] certified at h = 0.6");
  const auto h09 = design_common_lkf(model(), hull, 0.9, 0.1);
  v.expect(h09.status == DesignStatus::kInfeasible,
           "(b) common design at h = 0.9: " + std::string(to_string(h09.status)));

  const auto c06 = scale_into_region(model(), spectrum(), testing::row(-0.005, 0.2883), 0.6, 0.05);
  if (c06.design) {
    const auto& r = c06.design->range;
    v.expect(!r.empty && std::abs(r.c_min - 0.131) <= 0.01 && std::abs(r.c_max - 1.873) <= 0.05,
             "(c) c in [" + str(r.c_min) + ", " + str(r.c_max) + "] (0.131 +- 0.01, 1.873 +- 0.05)");
  } else {
    v.expect(false, "(c) " + c06.diagnosis);
  }
  const auto c09 = scale_into_region(model(), spectrum(), testing::row(-0.011, 0.1446), 0.9, 0.05);
  if (c09.design) {
    const auto& r = c09.design->range;
    v.expect(!r.empty && std::abs(r.c_max - 1.024) <= 0.05,
             "(d) c_max = " + str(r.c_max) + " (1.024 +- 0.05)");
  } else {
    v.expect(false, "(d) " + c09.diagnosis);
  }
  return v;
}

Verdict ac5() {
  Verdict v;
  const Eigen::MatrixXd K = testing::reference_gain();
  const auto ok = simulate(scenario(K, 0.419, 2026));
  const double e_ok = ok.sync_error_norm(ok.sync_error_norm.size() - 1);
  v.expect(!ok.diverged && e_ok < 1e-2, "tau = 0.419: ||delta(60)|| = " + str(e_ok, "%.3g") + " (< 1e-2)");
  const auto bad = simulate(scenario(K, 0.47, 2026));
  const double e_bad = bad.sync_error_norm(bad.sync_error_norm.size() - 1);
  v.expect(bad.diverged || e_bad >= 1e-2,
           "tau = 0.47: ||delta(60)|| = " + str(e_bad, "%.3g") + " (does not converge)");
  v.expect(e_bad > bad.sync_error_norm(0), "tau = 0.47: error grows from its initial value");
  return v;
}

Verdict ac6() {
  Verdict v;
  std::mt19937_64 rng(2026);

  {  // (a)
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
      const auto g = testing::random_rooted_graph(2 + k % 9, rng);
      if (!has_pinned_spanning_tree(g) ||
          pinned_spectrum(build_pinned_laplacian(g)).min_real <= 0.0) {
        ++bad;
      }
    }
    v.expect(bad == 0, "(a) 100 rooted random digraphs, violations: " + std::to_string(bad));
  }
  {  // (b)
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      const int n = 1 + k % 6;
      Eigen::MatrixXcd H = testing::random_hermitian(n, rng);
      if (k % 2) H -= (H.norm() + 0.1) * Eigen::MatrixXcd::Identity(n, n);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
      const Eigen::VectorXd er =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(realify(H)).eigenvalues();
      bool ok = (ev.maxCoeff() < 0) == (er.maxCoeff() < 0);
      for (int i = 0; i < n; ++i) {
        ok = ok && std::abs(er(2 * i) - ev(i)) < 1e-10 * (1 + std::abs(ev(i))) &&
             std::abs(er(2 * i + 1) - ev(i)) < 1e-10 * (1 + std::abs(ev(i)));
      }
      bad += !ok;
    }
    v.expect(bad == 0, "(b) 1000 Hermitian realifications, violations: " + std::to_string(bad));
  }
  {  // (c)
    int bad = 0;
    for (int k = 0; k < 200; ++k) {
      const auto p = testing::random_integral_pair(rng);
      bad += p.lhs < p.rhs - 1e-9 * (1 + std::abs(p.rhs));
    }
    for (int k = 0; k < 20; ++k) {
      const auto p = testing::random_integral_pair(rng, true);
      bad += std::abs(p.lhs - p.rhs) > 1e-10 * (1 + std::abs(p.rhs));
    }
    v.expect(bad == 0, "(c) 200 integral-inequality samples + 20 equality cases, violations: " +
                           std::to_string(bad));
  }
  {  // (d)
    if (!g_region) {
      v.expect(false, "(d) no region available");
    } else {
      const auto& hull = g_region->hull;
      const double h = g_region->h;
      const Eigen::MatrixXd K = testing::reference_gain();
      const Eigen::MatrixXd Ad = model().delay_matrix(K);
      std::gamma_distribution<double> G(1.0, 1.0);
      int lmi_bad = 0, oracle_bad = 0;
      for (int k = 0; k < 50; ++k) {
        Complex z = 0;
        double total = 0;
        for (const auto& c : hull) {
          const double w = G(rng);
          z += w * c;
          total += w;
        }
        z /= total;
        const std::vector<Complex> pt{z};
        lmi_bad += !robust_sync_check(model(), K, pt, h).certified();
        oracle_bad += !(rightmost_root(model(), Ad, z, h).rightmost_root.real() < 0.0);
      }
      v.expect(lmi_bad == 0 && oracle_bad == 0,
               "(d) 50 interior points: LMI failures " + std::to_string(lmi_bad) +
                   ", oracle failures " + std::to_string(oracle_bad));
    }
  }
  {  // (e)
    auto cfg = scenario(testing::reference_gain(), 0.419, 7);
    cfg.t_final = 20.0;
    const auto g = simulate(cfg);
    const auto p = simulate_agents(cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.times.size(); ++k) worst = std::max(worst, (g.delta(k) - p.delta(k)).norm());
    v.expect(worst <= 1e-8, "(e) global vs per-agent max difference " + str(worst, "%.2e"));
    auto oc = scenario(testing::reference_gain(), 0.2, 8);
    oc.t_final = 5.0;
    oc.dt = 0.02;
    const double order = convergence_order_check(oc);
    v.expect(order >= 3.0, "(e) observed integration order " + str(order, "%.3f") + " (>= 3.0)");
  }
  {  // (f)
    int feasible = 0, bad = 0;
    std::uniform_real_distribution<double> re(0.2, 3.0), im(-1.5, 1.5), hh(0.0, 0.8);
    auto audit = [&](const LmiProblem& p) {
      const auto r = check_feasible(p);
      if (r.verdict != Feasibility::kFeasible) return;
      ++feasible;
      const bool lib = verify_witness(p, r.witness->blocks).ok;
      // Independent dense check.
      const Eigen::MatrixXd F = p.constraint_at(r.witness->blocks);
      bool dense = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(F).eigenvalues().maxCoeff() < 0;
      for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        if (p.blocks[b].kind != BlockKind::kPositiveDefinite) continue;
        dense = dense && Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r.witness->blocks[b])
                                 .eigenvalues()
                                 .minCoeff() > 0;
      }
      bad += !(lib && dense);
    };
    const Eigen::MatrixXd Ad = model().delay_matrix(testing::reference_gain());
    for (int k = 0; k < 40; ++k) audit(stability_lmi(model(), Ad, {re(rng), im(rng)}, hh(rng)));
    for (int k = 0; k < 10; ++k) {
      audit(descriptor_design_lmi(model(), {re(rng), im(rng)}, 0.2 + hh(rng), 0.1));
    }
    v.expect(feasible > 0 && bad == 0, "(f) " + std::to_string(feasible) +
                                           " feasible verdicts, witness failures " +
                                           std::to_string(bad));
  }
  return v;
}

Verdict ac7() {
  Verdict v;
  const auto m = AgentModel::make(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1));
  const Eigen::MatrixXd K = Eigen::MatrixXd::Ones(1, 1);
  const std::vector<Complex> s{{1.0, 0.0}};
  const auto oracle = true_delay_margin(m, m.delay_matrix(K), s, 1e-7);
  const double pi2 = std::numbers::pi / 2;
  v.expect(std::abs(oracle.margin - pi2) <= 1e-4,
           "oracle margin " + str(oracle.margin, "%.6f") + " (pi/2 +- 1e-4)");
  const auto lkf = max_delay_bound(m, K, s, 1e-4);
  v.expect(lkf.status == DelayBoundStatus::kBounded && lkf.h_max <= pi2,
           "LKF bound " + str(lkf.h_max, "%.4f") + " <= pi/2");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1 delay bound reproduction", ac1},
      {"AC2 conservatism ordering", ac2},
      {"AC3 synchronizing region reproduction", ac3},
      {"AC4 controller design table", ac4},
      {"AC5 closed-loop validation", ac5},
      {"AC6 property suites", ac6},
      {"AC7 analytic anchor", ac7},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& ex) {
      v.expect(false, std::string("exception: ") + ex.what());
    }
    std::printf("[%s] %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(t0));
    for (const auto& n : v.notes) std::printf("         %s\n", n.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
