// SPDX-License-Identifier: Apache-2.0
#include "harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mfginv/errors.hpp"
#include "mfginv/field_io.hpp"

namespace mfginv::harness {

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void RunReport::check_at_most(std::string name, double value, double threshold, std::string detail) {
  checks.push_back({std::move(name), value <= threshold, value, threshold, std::move(detail)});
}

void RunReport::check_above(std::string name, double value, double threshold, std::string detail) {
  checks.push_back({std::move(name), value > threshold, value, threshold, std::move(detail)});
}

void RunReport::check_true(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["scenario_hash"] = scenario_hash;
  j["wall_time_s"] = wall_time;
  j["passed"] = passed();
  j["metrics"] = metrics;
  auto& cs = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    // JSON has no infinity; report it as null.
    if (std::isfinite(c.value)) e["value"] = c.value; else e["value"] = nullptr;
    e["threshold"] = c.threshold;
    if (!c.detail.empty()) e["detail"] = c.detail;
    cs.push_back(std::move(e));
  }
  j["artifacts"] = artifacts;
  j["notes"] = notes;
  return j;
}

void RunReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "report.json");
  if (!out) throw ValidationError("report: cannot write " + (dir / "report.json").string());
  out << to_json().dump(2) << '\n';
}

void emit_plot_data(RunReport& report, const std::map<std::string, ScalarField>& fields,
                    const ErrorTable& errors, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, f] : fields) {
    const std::string file = name + ".csv";
    write_csv(dir / file, f);
    report.artifacts.push_back(file);
  }
  if (errors.empty()) return;
  const std::string file = "recovery_error_vs_cutoff.csv";
  std::ofstream out(dir / file);
  if (!out) throw ValidationError("plot data: cannot write " + (dir / file).string());
  out << "cutoff,relative_l2_error\n";
  char buf[64];
  for (const auto& [c, e] : errors) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", c, e);
    out << buf;
  }
  if (!out) throw ValidationError("plot data: write failed for " + file);
  report.artifacts.push_back(file);
}

}  // namespace mfginv::harness
