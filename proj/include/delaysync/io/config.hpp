#pragma once

// YAML run configuration shared by all command-line subcommands.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/graph_topology.hpp"
#include "delaysync/lmi_builder.hpp"

namespace delaysync::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisSection {
  double tolerance = 1e-3;
  std::optional<double> h;
  double delta = 0.05;
  std::vector<double> sweep;
  double h_cap = 100.0;
};

struct DesignSection {
  std::string method = "scaled";
  std::optional<double> h;
  double epsilon = 0.1;
  double delta = 0.05;
  std::vector<double> epsilon_scan;
  bool widen_coupling = false;
};

struct SimulationSection {
  std::optional<double> tau;
  std::vector<double> tau_sweep;
  double t_final = 60.0;
  double dt = 1e-3;
  std::optional<Eigen::VectorXd> leader_x0;
  std::vector<Eigen::VectorXd> agent_x0;
  double random_low = -2.0;
  double random_high = 2.0;
  std::uint64_t seed = 2026;
  int csv_stride = 10;
};

struct Config {
  std::string path;
  AgentModel model;
  std::optional<Eigen::MatrixXd> gain;
  std::optional<PinnedDigraph> graph;
  AnalysisSection analysis;
  DesignSection design;
  SimulationSection simulation;
};

/// Throws ConfigError with a message naming the offending key.
Config load_config(const std::string& path);
Config parse_config(const std::string& yaml_text, const std::string& origin = "<string>");

/// Resolved configuration (defaults filled in) as YAML.
std::string to_yaml(const Config& config);

}  // namespace delaysync::io
