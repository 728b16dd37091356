#include <doctest.h>

#include <numbers>
#include <random>

#include "delaysync/delay_analysis.hpp"
#include "delaysync/spectral_oracle.hpp"
#include "test_support.hpp"

using delaysync::Complex;
using delaysync::DelayBoundStatus;

namespace {

delaysync::AgentModel scalar(double a) {
  return delaysync::AgentModel::make(Eigen::MatrixXd::Constant(1, 1, a),
                                     Eigen::MatrixXd::Ones(1, 1));
}

}  // namespace

TEST_CASE("scalar delayed feedback: the bound stays below pi/2") {
  const auto model = scalar(0.0);
  const Eigen::MatrixXd K = Eigen::MatrixXd::Ones(1, 1);
  const std::vector<Complex> v{{1.0, 0.0}};
  const auto r = delaysync::max_delay_bound(model, K, v, 1e-3);
  REQUIRE(r.status == DelayBoundStatus::kBounded);
  CHECK(r.h_max <= std::numbers::pi / 2);
  CHECK(r.h_max > 1.3);
  REQUIRE(r.per_vertex.size() == 1);
  CHECK(r.per_vertex[0].h_infeasible - r.per_vertex[0].h_feasible <= 1e-3 + 1e-12);
  // Monotone: certified below the bound, not certified well above it.
  CHECK(delaysync::robust_sync_check(model, K, v, 0.5 * r.h_max).certified());
  CHECK_FALSE(delaysync::robust_sync_check(model, K, v, 1.7).certified());
}

TEST_CASE("zero gain on a marginally stable plant has no bound") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = Eigen::MatrixXd::Zero(1, 2);
  const std::vector<Complex> v{{1.0, 0.0}};
  CHECK(delaysync::robust_sync_check(model, K, v, 0.0).outcome ==
        delaysync::SyncOutcome::kNotCertified);
  const auto r = delaysync::max_delay_bound(model, K, v, 1e-2);
  CHECK(r.status == DelayBoundStatus::kUndefined);
  REQUIRE(r.failing_vertex.has_value());
  CHECK(*r.failing_vertex == Complex(1.0, 0.0));
}

TEST_CASE("delay-independent scalar case is unbounded up to the cap") {
  const auto model = scalar(-2.0);
  const Eigen::MatrixXd K = Eigen::MatrixXd::Ones(1, 1);
  const std::vector<Complex> v{{1.0, 0.0}};
  delaysync::DelayBoundOptions opt;
  opt.h_cap = 10.0;
  const auto r = delaysync::max_delay_bound(model, K, v, 1e-2, opt);
  CHECK(r.status == DelayBoundStatus::kUnbounded);
  CHECK(r.h_max == doctest::Approx(10.0));
}

TEST_CASE("argument validation") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = testing::reference_gain();
  const std::vector<Complex> v{{1.0, 0.0}};
  CHECK_THROWS_AS(delaysync::max_delay_bound(model, K, v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delaysync::max_delay_bound(model, K, std::span<const Complex>{}, 1e-3),
                  std::invalid_argument);
  CHECK_THROWS_AS(delaysync::estimate_dsr(model, K, 0.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delaysync::estimate_dsr(model, K, -0.1, 0.1), std::invalid_argument);
}

TEST_CASE("spectrum overload checks the hull vertices") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = testing::reference_gain();
  const auto spec = delaysync::pinned_spectrum(
      delaysync::build_pinned_laplacian(testing::four_agent_graph()));
  const auto check = delaysync::robust_sync_check(model, K, spec, 0.3);
  CHECK(check.certified());
  CHECK(check.vertices.size() == delaysync::eigenvalue_hull(spec).size());
  for (const auto& v : check.vertices) CHECK(v.slack > 0.0);
  CHECK_FALSE(delaysync::robust_sync_check(model, K, spec, 0.5).certified());
}

TEST_CASE("traced region is sound at interior points") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = testing::reference_gain();
  const double h = 0.3;
  const auto est = delaysync::estimate_dsr(model, K, h, 0.1);
  REQUIRE_FALSE(est.empty);
  CHECK(est.hull.size() >= 3);
  CHECK(est.probes > 0);
  for (const auto& z : est.boundary_vertices) {
    CHECK(z.imag() >= 0.0);
    CHECK(delaysync::point_in_hull(est.hull, z));
    CHECK(delaysync::point_in_hull(est.hull, std::conj(z)));
  }
  std::mt19937_64 rng(37);
  const Complex c = delaysync::vertex_centroid(est.hull);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Eigen::MatrixXd Ad = model.delay_matrix(K);
  for (int k = 0; k < 10; ++k) {
    const Complex corner = est.hull[static_cast<std::size_t>(U(rng) * est.hull.size()) % est.hull.size()];
    const Complex z = c + U(rng) * (corner - c);
    const std::vector<Complex> pt{z};
    CHECK(delaysync::robust_sync_check(model, K, pt, h).certified());
    CHECK(delaysync::rightmost_root(model, Ad, z, h).rightmost_root.real() < 0.0);
  }
}

TEST_CASE("point in hull tolerance") {
  const std::vector<Complex> tri{{0, 0}, {1, 0}, {0, 1}};
  CHECK(delaysync::point_in_hull(tri, {0.5, 0.5}));
  CHECK(delaysync::point_in_hull(tri, {0.5, 0.5 + 1e-12}));
  CHECK_FALSE(delaysync::point_in_hull(tri, {0.5, 0.5 + 1e-6}));
}

TEST_CASE("analysis anchors on the oscillator network") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = testing::reference_gain();
  const auto spec = delaysync::pinned_spectrum(
      delaysync::build_pinned_laplacian(testing::four_agent_graph()));
  CHECK(delaysync::robust_sync_check(model, K, spec, 0.4190).certified());
  CHECK_FALSE(delaysync::robust_sync_check(model, K, spec, 0.45).certified());
  const std::vector<Complex> one{{1.0, 0.0}};
  for (double h : {0.0, 0.1, 1.0}) {
    CHECK_FALSE(delaysync::robust_sync_check(model, Eigen::MatrixXd::Zero(1, 2), one, h).certified());
  }
}

TEST_CASE("zero gain on a stable scalar plant is unbounded") {
  const auto model = scalar(-1.0);
  const std::vector<Complex> v{{1.0, 0.0}};
  delaysync::DelayBoundOptions opt;
  opt.h_cap = 5.0;
  const auto r = delaysync::max_delay_bound(model, Eigen::MatrixXd::Zero(1, 1), v, 1e-2, opt);
  CHECK(r.status == DelayBoundStatus::kUnbounded);
  CHECK(r.h_cap == 5.0);
}

TEST_CASE("traced vertices are confirmed by the LMI and the oracle") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = testing::reference_gain();
  const Eigen::MatrixXd Ad = model.delay_matrix(K);
  const double h = 0.419;
  const auto est = delaysync::estimate_dsr(model, K, h, 0.05);
  REQUIRE_FALSE(est.empty);
  for (const auto& z : est.boundary_vertices) {
    const std::vector<Complex> pt{z};
    CHECK(delaysync::robust_sync_check(model, K, pt, h).certified());
    for (double tau : {0.0, h / 2, h}) {
      CHECK(delaysync::rightmost_root(model, Ad, z, tau).rightmost_root.real() < 0.0);
    }
  }
  CHECK(delaysync::point_in_hull(est.hull, delaysync::vertex_centroid(est.hull)));
  double rmax = 0.0;
  Complex far;
  for (const auto& z : est.hull) {
    if (std::abs(z) > rmax) {
      rmax = std::abs(z);
      far = z;
    }
  }
  CHECK_FALSE(delaysync::point_in_hull(est.hull, 2.0 * far));
  CHECK(delaysync::point_in_hull(est.hull, {(3 - std::sqrt(5.0)) / 2, 0.0}));
}

TEST_CASE("without delay the region covers the Hurwitz grid points") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd K = testing::reference_gain();
  const double delta = 0.25;
  delaysync::DsrOptions opt;
  opt.column_cap_steps = 24;
  const auto est = delaysync::estimate_dsr(model, K, 0.0, delta, opt);
  REQUIRE_FALSE(est.empty);
  const Eigen::MatrixXd BK = model.B * K;
  int checked = 0;
  for (int i = 1; i <= 20; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const Complex z(i * delta, j * delta);
      const Eigen::MatrixXcd M = model.A.cast<Complex>() - z * BK.cast<Complex>();
      const double a = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(M).eigenvalues().real().maxCoeff();
      if (a < 0.0) {
        CHECK(delaysync::point_in_hull(est.hull, z));
        ++checked;
      }
    }
  }
  CHECK(checked > 20);
}
