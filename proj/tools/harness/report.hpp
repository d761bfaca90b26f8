// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfginv/field.hpp"

namespace mfginv::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunReport {
  std::string command;
  std::string scenario_hash;
  double wall_time = 0.0;  // seconds
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<std::string> artifacts;  // relative to the output directory
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool passed() const;
  void check_at_most(std::string name, double value, double threshold, std::string detail = {});
  void check_above(std::string name, double value, double threshold, std::string detail = {});
  void check_true(std::string name, bool ok, std::string detail = {});

  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& dir) const;  // report.json
};

/// (cutoff, relative error) rows.
using ErrorTable = std::vector<std::pair<int, double>>;

/// One CSV per field plus recovery_error_vs_cutoff.csv when the table is
/// non-empty. File names are appended to report.artifacts.
void emit_plot_data(RunReport& report, const std::map<std::string, ScalarField>& fields,
                    const ErrorTable& errors, const std::filesystem::path& dir);

}  // namespace mfginv::harness
