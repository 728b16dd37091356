#pragma once

// Self-contained SVG plots of region estimates and trajectories.

#include <string>
#include <vector>

#include "delaysync/dde_simulator.hpp"
#include "delaysync/geometry.hpp"

namespace delaysync::io {

struct RegionLayer {
  std::string label;
  std::vector<Complex> hull;
  std::vector<Complex> vertices;
};

/// Complex-plane plot: one filled polygon per layer, traced vertices as dots
/// and the given eigenvalues as crosses.
std::string region_svg(const std::vector<RegionLayer>& layers,
                       const std::vector<Complex>& eigenvalues, const std::string& title);

/// One panel per state component (leader dashed, agents solid) plus a panel
/// with log10 of the synchronization error norm.
std::string trajectory_svg(const Trajectory& trajectory, const std::string& title);

}  // namespace delaysync::io
