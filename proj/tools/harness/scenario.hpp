// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfginv/linearization.hpp"
#include "mfginv/mfg_solver.hpp"
#include "mfginv/recovery.hpp"

namespace mfginv::harness {

enum class DataSource { FiniteDifference, Direct, Synthetic };

struct Scenario {
  int dimension = 1;
  int points = 64;
  int steps = 256;
  double horizon = 0.1;

  std::vector<std::string> F{"0"};
  std::vector<std::string> G{"0"};
  std::string hamiltonian = "quadratic";
  std::vector<double> drift;  // constant linear part A1 of H, optional

  std::string m0 = "0";

  PicardOptions picard{};
  double smallness = 0.05;
  bool dealias = true;

  std::vector<Wavevector> probes{{0, 0, 0}};
  double epsilon = 1e-3;
  int order = 1;
  DataSource source = DataSource::FiniteDifference;

  int cutoff = 2;
  double tikhonov = 0.0;
  int time_basis = 1;
  CutoffPolicy policy = CutoffPolicy::Clamp;
  std::vector<int> cutoff_sweep;

  std::string output_dir;
  unsigned seed = 1;

  std::string hash;  // SHA-256 of the source bytes

  SpatialGrid grid() const { return SpatialGrid(dimension, points); }
  TimeGrid time() const { return TimeGrid(horizon, steps); }
  bool running_cost_time_dependent() const;

  /// Throws ValidationError listing every offending key.
  void validate() const;

  MfgConfig config() const;
  ScalarField initial_density() const;
  /// k-th Taylor coefficient (1-based), zero past the given list.
  ScalarField F_coefficient(int k) const;
  SpaceTimeField F_coefficient_spacetime(int k) const;
  ScalarField G_coefficient(int k) const;
  ProbePlan plan() const;
};

/// Parses YAML text; syntax errors become ParseError with 1-based positions.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
/// The scenario shipped with the tool.
const std::string& default_scenario_text();

std::string sha256_hex(const std::string& bytes);

}  // namespace mfginv::harness
