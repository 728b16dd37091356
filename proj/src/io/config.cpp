#include "delaysync/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace delaysync::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail(where, "unknown key '" + key + "'");
  }
}

double finite(const YAML::Node& node, const std::string& where) {
  double v = 0.0;
  try {
    v = node.as<double>();
  } catch (const YAML::Exception&) {
    fail(where, "expected a number");
  }
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

double positive(const YAML::Node& node, const std::string& where) {
  const double v = finite(node, where);
  if (!(v > 0.0)) fail(where, "must be positive");
  return v;
}

double nonnegative(const YAML::Node& node, const std::string& where) {
  const double v = finite(node, where);
  if (v < 0.0) fail(where, "must be nonnegative");
  return v;
}

std::vector<double> numbers(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(where, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(finite(node[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Eigen::VectorXd vector(const YAML::Node& node, const std::string& where) {
  const auto v = numbers(node, where);
  if (v.empty()) fail(where, "must not be empty");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() == 0) fail(where, "expected a nonempty list of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < node.size(); ++i) {
    rows.push_back(numbers(node[i], where + "[" + std::to_string(i) + "]"));
    if (rows.back().size() != rows.front().size() || rows.back().empty()) {
      fail(where, "rows must be nonempty and of equal length");
    }
  }
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

PinnedDigraph parse_graph(const YAML::Node& g) {
  check_keys(g, "graph", {"agents", "adjacency", "edges", "pinning"});
  if (!g["pinning"]) fail("graph.pinning", "missing");
  const Eigen::VectorXd pinning = vector(g["pinning"], "graph.pinning");
  if (g["adjacency"] && g["edges"]) fail("graph", "give either 'adjacency' or 'edges', not both");
  try {
    if (g["adjacency"]) {
      Eigen::MatrixXd adj = matrix(g["adjacency"], "graph.adjacency");
      if (g["agents"] && g["agents"].as<int>() != adj.rows()) {
        fail("graph.agents", "does not match the adjacency size");
      }
      return PinnedDigraph::from_adjacency(std::move(adj), pinning);
    }
    const int agents = g["agents"] ? g["agents"].as<int>() : static_cast<int>(pinning.size());
    std::vector<Edge> edges;
    if (g["edges"]) {
      if (!g["edges"].IsSequence()) fail("graph.edges", "expected a list of [from, to(, weight)]");
      for (std::size_t i = 0; i < g["edges"].size(); ++i) {
        const auto e = numbers(g["edges"][i], "graph.edges[" + std::to_string(i) + "]");
        if (e.size() != 2 && e.size() != 3) fail("graph.edges", "each edge is [from, to] or [from, to, weight]");
        if (e[0] != std::floor(e[0]) || e[1] != std::floor(e[1])) fail("graph.edges", "node indices must be integers");
        edges.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), e.size() == 3 ? e[2] : 1.0});
      }
    }
    return PinnedDigraph::from_edges(agents, edges, pinning);
  } catch (const std::invalid_argument& ex) {
    fail("graph", ex.what());
  }
}

Config parse(const YAML::Node& root, const std::string& origin) {
  Config cfg;
  cfg.path = origin;
  if (!root || !root.IsMap()) fail(origin, "top level must be a mapping");
  check_keys(root, origin, {"model", "graph", "analysis", "design", "simulation"});

  const auto model = root["model"];
  if (!model) fail("model", "missing section");
  check_keys(model, "model", {"A", "B", "K", "K_scale"});
  if (!model["A"] || !model["B"]) fail("model", "A and B are required");
  try {
    cfg.model = AgentModel::make(matrix(model["A"], "model.A"), matrix(model["B"], "model.B"));
  } catch (const std::invalid_argument& ex) {
    fail("model", ex.what());
  }
  if (model["K"]) {
    Eigen::MatrixXd K = matrix(model["K"], "model.K");
    if (K.rows() != cfg.model.m() || K.cols() != cfg.model.n()) fail("model.K", "must be m x n");
    if (model["K_scale"]) K *= finite(model["K_scale"], "model.K_scale");
    cfg.gain = std::move(K);
  } else if (model["K_scale"]) {
    fail("model.K_scale", "given without K");
  }

  if (root["graph"]) cfg.graph = parse_graph(root["graph"]);

  if (const auto a = root["analysis"]) {
    check_keys(a, "analysis", {"tolerance", "h", "delta", "sweep", "h_cap"});
    if (a["tolerance"]) cfg.analysis.tolerance = positive(a["tolerance"], "analysis.tolerance");
    if (a["h"]) cfg.analysis.h = nonnegative(a["h"], "analysis.h");
    if (a["delta"]) cfg.analysis.delta = positive(a["delta"], "analysis.delta");
    if (a["sweep"]) {
      cfg.analysis.sweep = numbers(a["sweep"], "analysis.sweep");
      for (double h : cfg.analysis.sweep) {
        if (h < 0.0) fail("analysis.sweep", "delays must be nonnegative");
      }
    }
    if (a["h_cap"]) cfg.analysis.h_cap = positive(a["h_cap"], "analysis.h_cap");
  }

  if (const auto d = root["design"]) {
    check_keys(d, "design", {"method", "h", "epsilon", "delta", "epsilon_scan", "widen_coupling"});
    if (d["method"]) {
      cfg.design.method = d["method"].as<std::string>();
      if (cfg.design.method != "common" && cfg.design.method != "scaled") {
        fail("design.method", "must be 'common' or 'scaled'");
      }
    }
    if (d["h"]) cfg.design.h = positive(d["h"], "design.h");
    if (d["epsilon"]) cfg.design.epsilon = positive(d["epsilon"], "design.epsilon");
    if (d["delta"]) cfg.design.delta = positive(d["delta"], "design.delta");
    if (d["epsilon_scan"]) {
      cfg.design.epsilon_scan = numbers(d["epsilon_scan"], "design.epsilon_scan");
      for (double e : cfg.design.epsilon_scan) {
        if (!(e > 0.0)) fail("design.epsilon_scan", "values must be positive");
      }
    }
    if (d["widen_coupling"]) cfg.design.widen_coupling = d["widen_coupling"].as<bool>();
  }

  if (const auto s = root["simulation"]) {
    check_keys(s, "simulation", {"tau", "tau_sweep", "t_final", "dt", "leader_x0", "agent_x0",
                                 "random_range", "seed", "csv_stride"});
    auto& sim = cfg.simulation;
    if (s["tau"]) sim.tau = nonnegative(s["tau"], "simulation.tau");
    if (s["tau_sweep"]) {
      sim.tau_sweep = numbers(s["tau_sweep"], "simulation.tau_sweep");
      for (double t : sim.tau_sweep) {
        if (t < 0.0) fail("simulation.tau_sweep", "delays must be nonnegative");
      }
    }
    if (s["t_final"]) sim.t_final = positive(s["t_final"], "simulation.t_final");
    if (s["dt"]) sim.dt = positive(s["dt"], "simulation.dt");
    if (s["leader_x0"]) {
      sim.leader_x0 = vector(s["leader_x0"], "simulation.leader_x0");
      if (sim.leader_x0->size() != cfg.model.n()) fail("simulation.leader_x0", "must have length n");
    }
    if (s["agent_x0"]) {
      const Eigen::MatrixXd x = matrix(s["agent_x0"], "simulation.agent_x0");
      if (x.cols() != cfg.model.n()) fail("simulation.agent_x0", "each row must have length n");
      for (Eigen::Index i = 0; i < x.rows(); ++i) sim.agent_x0.push_back(x.row(i).transpose());
    }
    if (s["random_range"]) {
      const auto r = numbers(s["random_range"], "simulation.random_range");
      if (r.size() != 2 || !(r[0] <= r[1])) fail("simulation.random_range", "expected [low, high]");
      sim.random_low = r[0];
      sim.random_high = r[1];
    }
    if (s["seed"]) sim.seed = s["seed"].as<std::uint64_t>();
    if (s["csv_stride"]) {
      sim.csv_stride = s["csv_stride"].as<int>();
      if (sim.csv_stride < 1) fail("simulation.csv_stride", "must be >= 1");
    }
  }
  if (cfg.graph && !cfg.simulation.agent_x0.empty() &&
      static_cast<int>(cfg.simulation.agent_x0.size()) != cfg.graph->n_agents()) {
    fail("simulation.agent_x0", "needs one row per agent");
  }
  return cfg;
}

void emit_matrix(YAML::Emitter& out, const Eigen::MatrixXd& m) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << m(i, j);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

void emit_vector(YAML::Emitter& out, const Eigen::VectorXd& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i);
  out << YAML::EndSeq;
}

}  // namespace

Config parse_config(const std::string& yaml_text, const std::string& origin) {
  try {
    return parse(YAML::Load(yaml_text), origin);
  } catch (const YAML::Exception& ex) {
    throw ConfigError(origin + ": " + ex.what());
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string to_yaml(const Config& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "A" << YAML::Value;
  emit_matrix(out, cfg.model.A);
  out << YAML::Key << "B" << YAML::Value;
  emit_matrix(out, cfg.model.B);
  if (cfg.gain) {
    out << YAML::Key << "K" << YAML::Value;
    emit_matrix(out, *cfg.gain);
  }
  out << YAML::EndMap;

  if (cfg.graph) {
    out << YAML::Key << "graph" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "adjacency" << YAML::Value;
    emit_matrix(out, cfg.graph->adjacency());
    out << YAML::Key << "pinning" << YAML::Value;
    emit_vector(out, cfg.graph->pinning());
    out << YAML::EndMap;
  }

  out << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tolerance" << YAML::Value << cfg.analysis.tolerance;
  if (cfg.analysis.h) out << YAML::Key << "h" << YAML::Value << *cfg.analysis.h;
  out << YAML::Key << "delta" << YAML::Value << cfg.analysis.delta;
  out << YAML::Key << "sweep" << YAML::Value << YAML::Flow << cfg.analysis.sweep;
  out << YAML::Key << "h_cap" << YAML::Value << cfg.analysis.h_cap;
  out << YAML::EndMap;

  out << YAML::Key << "design" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value << cfg.design.method;
  if (cfg.design.h) out << YAML::Key << "h" << YAML::Value << *cfg.design.h;
  out << YAML::Key << "epsilon" << YAML::Value << cfg.design.epsilon;
  out << YAML::Key << "delta" << YAML::Value << cfg.design.delta;
  out << YAML::Key << "epsilon_scan" << YAML::Value << YAML::Flow << cfg.design.epsilon_scan;
  out << YAML::Key << "widen_coupling" << YAML::Value << cfg.design.widen_coupling;
  out << YAML::EndMap;

  const auto& sim = cfg.simulation;
  out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
  if (sim.tau) out << YAML::Key << "tau" << YAML::Value << *sim.tau;
  out << YAML::Key << "tau_sweep" << YAML::Value << YAML::Flow << sim.tau_sweep;
  out << YAML::Key << "t_final" << YAML::Value << sim.t_final;
  out << YAML::Key << "dt" << YAML::Value << sim.dt;
  if (sim.leader_x0) {
    out << YAML::Key << "leader_x0" << YAML::Value;
    emit_vector(out, *sim.leader_x0);
  }
  if (!sim.agent_x0.empty()) {
    Eigen::MatrixXd x(sim.agent_x0.size(), sim.agent_x0.front().size());
    for (std::size_t i = 0; i < sim.agent_x0.size(); ++i) x.row(i) = sim.agent_x0[i].transpose();
    out << YAML::Key << "agent_x0" << YAML::Value;
    emit_matrix(out, x);
  }
  out << YAML::Key << "random_range" << YAML::Value << YAML::Flow
      << std::vector<double>{sim.random_low, sim.random_high};
  out << YAML::Key << "seed" << YAML::Value << sim.seed;
  out << YAML::Key << "csv_stride" << YAML::Value << sim.csv_stride;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace delaysync::io
