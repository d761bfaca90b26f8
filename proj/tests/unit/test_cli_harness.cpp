#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "harness/commands.hpp"
#include "harness/report.hpp"
#include "harness/scenario.hpp"
#include "mfginv/errors.hpp"

using namespace mfginv;
using namespace mfginv::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mfginv_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const auto log = scratch("cli_log") / "out.txt";
  const std::string cmd = std::string(MFGINV_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) *out = slurp(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmall = R"yaml(
grid: {dimension: 1, points: 16, steps: 32, horizon: 0.1}
costs: {F: ["0.5*sin(2*pi*x)"], G: ["0.3*cos(2*pi*x)"]}
initial: {m0: "0.01*cos(2*pi*x)"}
)yaml";

}  // namespace

TEST(Scenario, ParsesBundledDefault) {
  const auto s = parse_scenario(default_scenario_text());
  EXPECT_EQ(s.dimension, 1);
  EXPECT_EQ(s.points, 64);
  EXPECT_EQ(s.order, 2);
  EXPECT_EQ(s.F.size(), 2u);
  EXPECT_EQ(s.hash.size(), 64u);
  EXPECT_NO_THROW(s.validate());
  EXPECT_NO_THROW(s.config().validate());
}

TEST(Scenario, HashIsDeterministicAndContentSensitive) {
  EXPECT_EQ(parse_scenario(kSmall).hash, parse_scenario(kSmall).hash);
  EXPECT_NE(parse_scenario(kSmall).hash, parse_scenario(std::string(kSmall) + "\n").hash);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Scenario, ValidationNamesOffendingKey) {
  auto s = parse_scenario(kSmall);
  s.horizon = -1.0;
  try {
    s.validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("horizon"), std::string::npos);
  }
}

TEST(Scenario, SyntaxErrorCarriesPosition) {
  try {
    parse_scenario("grid:\n  points: [1, 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 2);
    EXPECT_GE(e.column(), 1);
  }
  EXPECT_THROW(parse_scenario("grid: {pionts: 8}\n"), ValidationError);
  try {
    parse_scenario("costs:\n  F: [\"sin(2*pi*x\"]\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 7);
    EXPECT_NE(std::string(e.what()).find("costs.F"), std::string::npos);
  }
}

TEST(Scenario, OutputDirectoryPrecedence) {
  auto s = parse_scenario(kSmall);
  RunOptions opt;
  opt.out_dir = "/tmp/explicit";
  EXPECT_EQ(resolve_output_dir("forward", s, opt), fs::path("/tmp/explicit"));
  opt.out_dir.clear();
  ::setenv(kOutputRootEnv, "/tmp/root", 1);
  EXPECT_EQ(resolve_output_dir("forward", s, opt), fs::path("/tmp/root") / ("forward-" + s.hash.substr(0, 8)));
  s.output_dir = "/tmp/from_scenario";
  EXPECT_EQ(resolve_output_dir("forward", s, opt), fs::path("/tmp/from_scenario"));
  ::unsetenv(kOutputRootEnv);
}

TEST(Report, PlotDataShapes) {
  const auto dir = scratch("plot");
  const SpatialGrid g(1, 64);
  RunReport rep;
  emit_plot_data(rep, {{"f", ScalarField::constant(g, 1.0)}}, {{0, 0.5}, {1, 0.1}, {2, 0.01}}, dir);
  EXPECT_EQ(rep.artifacts.size(), 2u);
  std::ifstream f(dir / "f.csv");
  int rows = 0;
  for (std::string line; std::getline(f, line);)
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 64 + 1);
  std::ifstream e(dir / "recovery_error_vs_cutoff.csv");
  std::string header;
  std::getline(e, header);
  EXPECT_EQ(header, "cutoff,relative_l2_error");
  rows = 0;
  for (std::string line; std::getline(e, line);)
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Report, ChecksAndJson) {
  RunReport rep;
  rep.command = "forward";
  rep.check_at_most("a", 1.0, 2.0);
  rep.check_above("b", 1.0, 0.0);
  EXPECT_TRUE(rep.passed());
  rep.check_true("c", false, "why");
  EXPECT_FALSE(rep.passed());
  const auto j = rep.to_json();
  EXPECT_EQ(j["command"], "forward");
  EXPECT_EQ(j["checks"].size(), 3u);
}

TEST(Commands, ForwardIsDeterministic) {
  const auto s = parse_scenario(kSmall);
  RunOptions a, b;
  a.out_dir = scratch("fwd_a");
  b.out_dir = scratch("fwd_b");
  b.threads = 4;
  const auto ra = run("forward", s, a);
  run("forward", s, b);
  EXPECT_TRUE(ra.passed());
  for (const auto& art : ra.artifacts) EXPECT_EQ(slurp(a.out_dir / art), slurp(b.out_dir / art)) << art;
  EXPECT_TRUE(fs::exists(a.out_dir / "report.json"));
}

TEST(Commands, MeasureOnZeroInputIsZero) {
  auto s = parse_scenario(kSmall);
  s.m0 = "0";
  RunOptions opt;
  opt.out_dir = scratch("zero");
  const auto r = run("measure", s, opt);
  EXPECT_TRUE(r.passed());
  bool found = false;
  for (const auto& c : r.checks)
    if (c.name == "zero_input_zero_output") {
      found = true;
      EXPECT_EQ(c.value, 0.0);
    }
  EXPECT_TRUE(found);
}

TEST(Commands, SelftestPasses) {
  RunOptions opt;
  opt.out_dir = scratch("selftest");
  const auto r = run("selftest", parse_scenario(default_scenario_text()), opt);
  EXPECT_GE(r.checks.size(), 10u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Commands, UnknownCommandRejected) {
  RunOptions opt;
  opt.out_dir = scratch("unknown");
  EXPECT_THROW(run("nope", parse_scenario(kSmall), opt), ValidationError);
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("cli");
  std::string log;
  EXPECT_EQ(run_cli("selftest --out " + (out / "s").string(), &log), 0) << log;
  EXPECT_EQ(run_cli("forward --out " + (out / "f").string()), 0);
  EXPECT_TRUE(fs::exists(out / "f" / "report.json"));
  const auto j = nlohmann::json::parse(slurp(out / "f" / "report.json"));
  EXPECT_EQ(j["command"], "forward");

  const auto bad = out / "bad.yaml";
  std::ofstream(bad) << "grid: {horizon: -1}\n";
  EXPECT_EQ(run_cli("forward --scenario " + bad.string() + " --out " + (out / "b").string(), &log), 2);
  EXPECT_NE(log.find("horizon"), std::string::npos) << log;

  std::ofstream(out / "syntax.yaml") << "grid:\n  points: [1\n";
  EXPECT_EQ(run_cli("forward --scenario " + (out / "syntax.yaml").string()), 2);
  EXPECT_NE(run_cli("frobnicate"), 0);

  EXPECT_EQ(run_cli("verify-counterexample --which running --out " + (out / "v").string()), 0);
  EXPECT_EQ(run_cli("verify-counterexample --which ode --out " + (out / "o").string(), &log), 3);
  EXPECT_NE(log.find("dt_Lu1_zero"), std::string::npos);
}

TEST(Cli, BundledSimultaneousScenario) {
  std::string log;
  EXPECT_EQ(run_cli(std::string("recover-fg --scenario ") + MFGINV_SCENARIO_DIR + "/simultaneous.yaml --out " +
                        (scratch("fg") / "o").string(),
                    &log),
            0)
      << log;
}
