#pragma once

// Result files: CSV tables, the JSON design file and the run manifest.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/controller_synthesis.hpp"

namespace delaysync::io {

/// Numeric CSV with a header row; values printed with "%.17g".
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Reads a CSV written by write_csv (header is returned separately).
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header = nullptr);

std::string design_to_json(const ControllerDesign& design);
/// Throws std::runtime_error on malformed input.
ControllerDesign design_from_json(const std::string& text);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_path;
  std::string config_snapshot;
  std::string tool_version;
  std::map<std::string, double> solver_settings;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> verdicts;
  int exit_code = 0;
};

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace delaysync::io
