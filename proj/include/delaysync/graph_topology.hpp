#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/geometry.hpp"

namespace delaysync {

/// Directed edge carrying information from node `from` into node `to`
/// (adjacency entry (to, from)).
struct Edge {
  int from = 0;
  int to = 0;
  double weight = 1.0;
};

/// Weighted digraph of N followers plus the pinning gains g_i that couple
/// individual followers to the leader. Immutable once constructed.
class PinnedDigraph {
 public:
  /// Entry (i, j) is the weight of the edge from node j into node i. Throws
  /// std::invalid_argument on a non-square matrix, a self-loop, a negative
  /// weight or a pinning vector of the wrong length.
  static PinnedDigraph from_adjacency(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning);

  static PinnedDigraph from_edges(int n_agents, std::span<const Edge> edges,
                                  Eigen::VectorXd pinning);

  int n_agents() const { return static_cast<int>(adjacency_.rows()); }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  const Eigen::VectorXd& pinning() const { return pinning_; }

  /// diag(row sums of the adjacency matrix).
  Eigen::MatrixXd in_degree() const;
  /// L = D - E; rows sum to zero.
  Eigen::MatrixXd laplacian() const;

 private:
  PinnedDigraph(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning)
      : adjacency_(std::move(adjacency)), pinning_(std::move(pinning)) {}

  Eigen::MatrixXd adjacency_;
  Eigen::VectorXd pinning_;
};

/// Eigenvalues of the pinned Laplacian, sorted by (real, imaginary).
struct PinnedSpectrum {
  std::vector<Complex> eigenvalues;
  double min_real = 0.0;
  double max_real = 0.0;
};

class SpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// L + G with G = diag(pinning).
Eigen::MatrixXd build_pinned_laplacian(const PinnedDigraph& graph);

/// True iff some node reaches every other node along directed edges and at
/// least one such root is pinned to the leader. Under this condition every
/// eigenvalue of L + G lies in the open right half-plane.
bool has_pinned_spanning_tree(const PinnedDigraph& graph);

/// Dense eigensolve (real Schur reduction). Throws SpectrumError if the
/// iteration does not converge.
PinnedSpectrum pinned_spectrum(const Eigen::MatrixXd& pinned_laplacian);

/// Counterclockwise vertices of the convex hull of the spectrum.
std::vector<Complex> eigenvalue_hull(const PinnedSpectrum& spectrum);

}  // namespace delaysync
