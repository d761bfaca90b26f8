// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <thread>

#include "harness/commands.hpp"
#include "mfginv/errors.hpp"

namespace h = mfginv::harness;

int main(int argc, char** argv) {
  CLI::App app{"mfginv: periodic mean field game solver and inverse-cost reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string scenario_path, out_dir, which = "all";
  int threads = 1;
  bool verbose = false;
  app.add_option("--scenario", scenario_path, "Scenario file (YAML); bundled default if omitted");
  app.add_option("--out", out_dir, std::string("Output directory; default under $") + h::kOutputRootEnv);
  app.add_option("--threads", threads, "Worker threads for independent probe runs")
      ->check(CLI::Range(1, 1024));
  app.add_flag("-v,--verbose", verbose, "Progress on stderr");

  const std::map<std::string, std::string> about{
      {"forward", "Solve the coupled system for the scenario's m0"},
      {"measure", "Write the measurement u(., 0)"},
      {"linearize", "Compare finite-difference and direct linearizations"},
      {"recover-f", "Reconstruct the running-cost coefficients"},
      {"recover-g", "Reconstruct the terminal-cost coefficients"},
      {"recover-fg", "Reconstruct F1 and G1 together"},
      {"verify-counterexample", "Check the non-uniqueness constructions"},
      {"selftest", "Run the built-in property suites"},
  };
  for (const auto& name : h::command_names()) {
    const auto it = about.find(name);
    auto* sub = app.add_subcommand(name, it == about.end() ? std::string() : it->second);
    if (name == "verify-counterexample")
      sub->add_option("--which", which, "terminal, running, ode or all")
          ->check(CLI::IsMember({"terminal", "running", "ode", "all"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : h::kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const h::Scenario s =
        scenario_path.empty() ? h::parse_scenario(h::default_scenario_text()) : h::load_scenario(scenario_path);
    h::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.verbose = verbose;
    opt.which = which;
    opt.log = &std::cerr;
    const h::RunReport rep = h::run(command, s, opt);
    for (const auto& c : rep.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
                << "  threshold=" << c.threshold << '\n';
    for (const auto& n : rep.notes) std::cout << "note: " << n << '\n';
    std::cout << "report: " << (h::resolve_output_dir(command, s, opt) / "report.json").string() << '\n';
    return rep.passed() ? h::kExitOk : h::kExitNumerical;
  } catch (const mfginv::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kExitValidation;
  } catch (const mfginv::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return h::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kExitNumerical;
  }
}
