#include <doctest.h>

#include <random>

#include "delaysync/graph_topology.hpp"
#include "test_support.hpp"

using delaysync::Complex;
using delaysync::PinnedDigraph;

TEST_CASE("pinned Laplacian of the four-agent graph") {
  const auto g = testing::four_agent_graph();
  const Eigen::MatrixXd M = delaysync::build_pinned_laplacian(g);
  Eigen::MatrixXd expected(4, 4);
  expected << 3, -1, 0, -1,
              0, 2, -1, 0,
              -1, 0, 1, 0,
              0, -1, -1, 2;
  CHECK((M - expected).norm() < 1e-15);
  CHECK(g.laplacian().rowwise().sum().norm() < 1e-15);
  CHECK(delaysync::has_pinned_spanning_tree(g));

  const auto spec = delaysync::pinned_spectrum(M);
  const auto ref = testing::reference_eigenvalues(g);
  REQUIRE(spec.eigenvalues.size() == 4);
  for (const auto& z : ref) {
    double best = 1e9;
    for (const auto& w : spec.eigenvalues) best = std::min(best, std::abs(z - w));
    CHECK(best < 1e-10);
  }
  CHECK(spec.min_real == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-10));
  CHECK(spec.max_real == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-10));
  const auto hull = delaysync::eigenvalue_hull(spec);
  CHECK(hull.size() == 4);
}

TEST_CASE("spanning tree condition on chains") {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(3, 3);
  E(1, 0) = 1;  // 0 -> 1
  E(2, 1) = 1;  // 1 -> 2
  Eigen::VectorXd head(3), tail(3), none = Eigen::VectorXd::Zero(3);
  head << 1, 0, 0;
  tail << 0, 0, 1;
  CHECK(delaysync::has_pinned_spanning_tree(PinnedDigraph::from_adjacency(E, head)));
  CHECK_FALSE(delaysync::has_pinned_spanning_tree(PinnedDigraph::from_adjacency(E, tail)));
  CHECK_FALSE(delaysync::has_pinned_spanning_tree(PinnedDigraph::from_adjacency(E, none)));
  // Without a spanning tree L + G has an eigenvalue at the origin.
  const auto spec = delaysync::pinned_spectrum(
      delaysync::build_pinned_laplacian(PinnedDigraph::from_adjacency(E, tail)));
  CHECK(spec.min_real == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("invalid graphs are rejected") {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd g = Eigen::VectorXd::Ones(2);
  Eigen::MatrixXd loop = E;
  loop(0, 0) = 1;
  CHECK_THROWS_AS(PinnedDigraph::from_adjacency(loop, g), std::invalid_argument);
  Eigen::MatrixXd neg = E;
  neg(0, 1) = -1;
  CHECK_THROWS_AS(PinnedDigraph::from_adjacency(neg, g), std::invalid_argument);
  CHECK_THROWS_AS(PinnedDigraph::from_adjacency(Eigen::MatrixXd::Zero(2, 3), g),
                  std::invalid_argument);
  CHECK_THROWS_AS(PinnedDigraph::from_adjacency(E, Eigen::VectorXd::Ones(3)), std::invalid_argument);
  const std::vector<delaysync::Edge> bad{{0, 5}};
  CHECK_THROWS_AS(PinnedDigraph::from_edges(2, bad, g), std::invalid_argument);
}

TEST_CASE("rooted random digraphs have spectra in the open right half-plane") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 9;
    const auto g = testing::random_rooted_graph(n, rng);
    REQUIRE(delaysync::has_pinned_spanning_tree(g));
    for (const auto& z : testing::reference_eigenvalues(g)) CHECK(z.real() > 1e-12);
    CHECK(delaysync::pinned_spectrum(delaysync::build_pinned_laplacian(g)).min_real > 1e-12);
  }
}

TEST_CASE("degenerate pinned Laplacians") {
  const std::vector<delaysync::Edge> none;
  const auto empty = PinnedDigraph::from_edges(3, none, Eigen::VectorXd::Zero(3));
  CHECK(delaysync::build_pinned_laplacian(empty).norm() == 0.0);
  const auto ident = PinnedDigraph::from_edges(3, none, Eigen::VectorXd::Ones(3));
  const auto spec = delaysync::pinned_spectrum(delaysync::build_pinned_laplacian(ident));
  for (const auto& z : spec.eigenvalues) CHECK(std::abs(z - Complex(1, 0)) < 1e-14);

  // Zero pinning leaves the Laplacian row-sum identity intact.
  auto g = testing::four_agent_graph();
  const auto unpinned = PinnedDigraph::from_adjacency(g.adjacency(), Eigen::VectorXd::Zero(4));
  CHECK(delaysync::build_pinned_laplacian(unpinned).rowwise().sum().norm() < 1e-15);
}

TEST_CASE("disconnected components never have a pinned spanning tree") {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(4, 4);
  E(1, 0) = E(0, 1) = 1;
  E(3, 2) = E(2, 3) = 1;
  for (int mask = 0; mask < 16; ++mask) {
    Eigen::VectorXd g(4);
    for (int i = 0; i < 4; ++i) g(i) = (mask >> i) & 1;
    CHECK_FALSE(delaysync::has_pinned_spanning_tree(PinnedDigraph::from_adjacency(E, g)));
  }
}

TEST_CASE("hull of the four-agent spectrum has every eigenvalue as a vertex") {
  const auto spec = delaysync::pinned_spectrum(
      delaysync::build_pinned_laplacian(testing::four_agent_graph()));
  const auto hull = delaysync::eigenvalue_hull(spec);
  for (const auto& z : spec.eigenvalues) {
    CHECK(std::any_of(hull.begin(), hull.end(), [&](Complex v) { return std::abs(v - z) < 1e-12; }));
  }
  const Complex expected[] = {{(3 - std::sqrt(5.0)) / 2, 0},
                              {2.5, -std::sqrt(3.0) / 2},
                              {2.5, std::sqrt(3.0) / 2},
                              {(3 + std::sqrt(5.0)) / 2, 0}};
  for (const auto& e : expected) {
    CHECK(std::any_of(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                      [&](Complex v) { return std::abs(v - e) < 1e-10; }));
  }
}
