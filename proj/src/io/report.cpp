#include "delaysync/io/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace delaysync::io {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty()) {
    throw std::runtime_error("design file: matrix must be a nonempty list of rows");
  }
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw std::runtime_error("design file: ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

json points_json(const std::vector<Complex>& pts) {
  json out = json::array();
  for (const auto& z : pts) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<Complex> points_from(const json& arr) {
  std::vector<Complex> out;
  for (const auto& p : arr) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::fprintf(f, "%s%s", i ? "," : "", header[i].c_str());
  }
  std::fprintf(f, "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) std::fprintf(f, "%s%.17g", i ? "," : "", row[i]);
    std::fprintf(f, "\n");
  }
  if (std::fclose(f) != 0) throw std::runtime_error("error closing " + path);
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      first = false;
      if (header) {
        header->clear();
        while (std::getline(ss, cell, ',')) header->push_back(cell);
      }
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string design_to_json(const ControllerDesign& d) {
  json j;
  j["method"] = std::string(to_string(d.certificate.method));
  j["base_gain"] = matrix_json(d.base_gain);
  j["c"] = d.c;
  j["gain"] = matrix_json(d.gain());
  j["c_range"] = {{"empty", d.range.empty},
                  {"c_min", d.range.c_min},
                  {"c_max", d.range.c_max},
                  {"lower_at_probe", d.range.lower_at_probe},
                  {"upper_at_probe", d.range.upper_at_probe}};
  j["certificate"] = {{"h", d.certificate.h},
                      {"epsilon", d.certificate.epsilon},
                      {"delta", d.certificate.delta},
                      {"sigma_r", d.certificate.sigma_r},
                      {"vertices", points_json(d.certificate.vertices)},
                      {"hull", points_json(d.certificate.hull)}};
  return j.dump(2) + "\n";
}

ControllerDesign design_from_json(const std::string& text) {
  ControllerDesign d;
  try {
    const json j = json::parse(text);
    const auto method = j.at("method").get<std::string>();
    if (method == "common") {
      d.certificate.method = DesignMethod::kCommonLkf;
    } else if (method == "scaled") {
      d.certificate.method = DesignMethod::kScaled;
    } else {
      throw std::runtime_error("design file: unknown method '" + method + "'");
    }
    d.base_gain = matrix_from(j.at("base_gain"));
    d.c = j.at("c").get<double>();
    if (!(d.c > 0.0)) throw std::runtime_error("design file: c must be positive");
    const auto& r = j.at("c_range");
    d.range.empty = r.at("empty").get<bool>();
    d.range.c_min = r.at("c_min").get<double>();
    d.range.c_max = r.at("c_max").get<double>();
    d.range.lower_at_probe = r.value("lower_at_probe", false);
    d.range.upper_at_probe = r.value("upper_at_probe", false);
    const auto& c = j.at("certificate");
    d.certificate.h = c.at("h").get<double>();
    d.certificate.epsilon = c.value("epsilon", 0.0);
    d.certificate.delta = c.value("delta", 0.0);
    d.certificate.sigma_r = c.value("sigma_r", 0.0);
    d.certificate.vertices = points_from(c.value("vertices", json::array()));
    d.certificate.hull = points_from(c.value("hull", json::array()));
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("design file: ") + ex.what());
  }
  return d;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("error writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["arguments"] = m.arguments;
  j["config_path"] = m.config_path;
  j["config_snapshot"] = m.config_snapshot;
  j["tool_version"] = m.tool_version;
  j["solver_settings"] = m.solver_settings;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  j["outputs"] = m.outputs;
  j["verdicts"] = m.verdicts;
  j["exit_code"] = m.exit_code;
  return j.dump(2) + "\n";
}

}  // namespace delaysync::io
