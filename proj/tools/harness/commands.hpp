// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "harness/report.hpp"
#include "harness/scenario.hpp"

namespace mfginv::harness {

inline constexpr const char* kOutputRootEnv = "MFGINV_OUTPUT_ROOT";

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

struct RunOptions {
  std::filesystem::path out_dir;  // empty: derived from the scenario
  int threads = 1;
  bool verbose = false;
  std::string which = "all";  // verify-counterexample: terminal | running | ode | all
  std::ostream* log = nullptr;
};

const std::vector<std::string>& command_names();

/// Scenario output.directory, else $MFGINV_OUTPUT_ROOT/<command>-<hash8>,
/// else ./mfginv-out/<command>-<hash8>.
std::filesystem::path resolve_output_dir(const std::string& command, const Scenario& s,
                                         const RunOptions& opt);

/// Runs one pipeline and writes report.json plus artifacts. Library errors
/// propagate; failed checks are recorded in the report.
RunReport run(const std::string& command, const Scenario& s, const RunOptions& opt);

/// Property suites shared by `selftest`; appends one check per suite.
void run_selftest(const Scenario& s, const RunOptions& opt, RunReport& report);

}  // namespace mfginv::harness
