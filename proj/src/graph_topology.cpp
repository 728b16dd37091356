#include "delaysync/graph_topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace delaysync {

PinnedDigraph PinnedDigraph::from_adjacency(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning) {
  const auto n = adjacency.rows();
  if (n == 0 || adjacency.cols() != n) {
    throw std::invalid_argument("adjacency matrix must be square and nonempty");
  }
  if (pinning.size() != n) {
    throw std::invalid_argument("pinning vector length " + std::to_string(pinning.size()) +
                                " does not match " + std::to_string(n) + " agents");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) {
      throw std::invalid_argument("self-loop at node " + std::to_string(i));
    }
    if (pinning(i) < 0.0 || !std::isfinite(pinning(i))) {
      throw std::invalid_argument("pinning gains must be finite and nonnegative");
    }
  }
  if ((adjacency.array() < 0.0).any() || !adjacency.allFinite()) {
    throw std::invalid_argument("edge weights must be finite and nonnegative");
  }
  return PinnedDigraph(std::move(adjacency), std::move(pinning));
}

PinnedDigraph PinnedDigraph::from_edges(int n_agents, std::span<const Edge> edges,
                                        Eigen::VectorXd pinning) {
  if (n_agents <= 0) throw std::invalid_argument("n_agents must be positive");
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n_agents, n_agents);
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= n_agents || e.to < 0 || e.to >= n_agents) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (adjacency(e.to, e.from) != 0.0) {
      throw std::invalid_argument("repeated edge " + std::to_string(e.from) + "->" +
                                  std::to_string(e.to));
    }
    adjacency(e.to, e.from) = e.weight;
  }
  return from_adjacency(std::move(adjacency), std::move(pinning));
}

Eigen::MatrixXd PinnedDigraph::in_degree() const {
  return adjacency_.rowwise().sum().asDiagonal();
}

Eigen::MatrixXd PinnedDigraph::laplacian() const { return in_degree() - adjacency_; }

Eigen::MatrixXd build_pinned_laplacian(const PinnedDigraph& graph) {
  Eigen::MatrixXd m = graph.laplacian();
  m.diagonal() += graph.pinning();
  return m;
}

bool has_pinned_spanning_tree(const PinnedDigraph& graph) {
  const int n = graph.n_agents();
  const auto& a = graph.adjacency();
  // successors[j] = nodes that receive information from j.
  std::vector<std::vector<int>> successors(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a(i, j) > 0.0) successors[j].push_back(i);
    }
  }
  std::vector<char> seen(n);
  for (int root = 0; root < n; ++root) {
    if (graph.pinning()(root) <= 0.0) continue;
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<int> frontier{root};
    seen[root] = 1;
    int reached = 1;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop_front();
      for (int w : successors[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          frontier.push_back(w);
        }
      }
    }
    if (reached == n) return true;
  }
  return false;
}

PinnedSpectrum pinned_spectrum(const Eigen::MatrixXd& pinned_laplacian) {
  if (pinned_laplacian.rows() != pinned_laplacian.cols() || pinned_laplacian.rows() == 0) {
    throw std::invalid_argument("pinned_spectrum: matrix must be square and nonempty");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(pinned_laplacian, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw SpectrumError("pinned_spectrum: eigenvalue iteration did not converge");
  }
  PinnedSpectrum out;
  const Eigen::VectorXcd ev = solver.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  out.min_real = out.eigenvalues.front().real();
  out.max_real = out.eigenvalues.front().real();
  for (const auto& z : out.eigenvalues) {
    out.min_real = std::min(out.min_real, z.real());
    out.max_real = std::max(out.max_real, z.real());
  }
  return out;
}

std::vector<Complex> eigenvalue_hull(const PinnedSpectrum& spectrum) {
  if (spectrum.eigenvalues.empty()) {
    throw std::invalid_argument("eigenvalue_hull: empty spectrum");
  }
  return convex_hull(spectrum.eigenvalues);
}

}  // namespace delaysync
