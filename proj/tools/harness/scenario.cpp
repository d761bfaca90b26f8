// SPDX-License-Identifier: Apache-2.0
#include "harness/scenario.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "mfginv/errors.hpp"
#include "mfginv/expression.hpp"

namespace mfginv::harness {

namespace {

[[noreturn]] void parse_fail(const std::string& what, const YAML::Mark& m) {
  throw ParseError(what, m.line + 1, m.column + 1);
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    parse_fail(key + ": wrong value type", n.Mark());
  }
}

void reject_unknown(const YAML::Node& section, const std::string& name,
                    const std::set<std::string>& allowed, std::vector<std::string>& errors) {
  for (const auto& kv : section) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) errors.push_back(name + "." + key + ": unknown key");
  }
}

Expr compile(const std::string& src, const std::string& key) {
  try {
    return parse_expression(src);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    if (const auto at = msg.rfind(" at line "); at != std::string::npos) msg.resize(at);
    throw ParseError(key + ": " + msg, e.line(), e.column());
  }
}

// Reads an expression string and checks its syntax, reporting errors at the
// position inside the scenario file.
std::string expression_node(const YAML::Node& n, const std::string& key) {
  const auto src = scalar<std::string>(n, key);
  try {
    parse_expression(src);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    if (const auto at = msg.rfind(" at line "); at != std::string::npos) msg.resize(at);
    const YAML::Mark m = n.Mark();
    const int quote = n.Tag() == "!" ? 1 : 0;
    const int column = e.line() == 1 ? m.column + 1 + quote + e.column() - 1 : e.column();
    throw ParseError(key + ": " + msg, m.line + e.line(), column);
  }
  return src;
}

bool uses_time(const Expr& e) {
  const Expr d = e.diff(Variable::T);
  return !(d.is_constant() && d.constant_value() == 0.0);
}

ScalarField sample_static(const std::string& src, const std::string& key, const SpatialGrid& g) {
  const Expr e = compile(src, key);
  if (uses_time(e)) throw ValidationError(key + ": must not depend on t");
  return ScalarField::sample(g, [&](const std::array<double, 3>& x) {
    return e.eval({x[0], x[1], x[2], 0.0});
  });
}

}  // namespace

bool Scenario::running_cost_time_dependent() const {
  for (std::size_t k = 0; k < F.size(); ++k)
    if (uses_time(compile(F[k], "costs.F[" + std::to_string(k) + "]"))) return true;
  return false;
}

void Scenario::validate() const {
  std::vector<std::string> bad;
  if (dimension < 1 || dimension > 3) bad.push_back("dimension: must be 1, 2 or 3");
  if (points < 4) bad.push_back("points: must be >= 4");
  if (steps < 2) bad.push_back("steps: must be >= 2");
  if (!(horizon > 0.0)) bad.push_back("horizon: must be > 0");
  if (F.empty()) bad.push_back("costs.F: at least one coefficient required");
  if (G.empty()) bad.push_back("costs.G: at least one coefficient required");
  if (hamiltonian != "quadratic" && hamiltonian != "quadratic-series")
    bad.push_back("costs.hamiltonian: unknown builtin '" + hamiltonian + "'");
  if (!drift.empty() && static_cast<int>(drift.size()) != dimension)
    bad.push_back("costs.drift: needs one entry per dimension");
  if (!(picard.relaxation > 0.0 && picard.relaxation <= 1.0))
    bad.push_back("solver.relaxation: must lie in (0, 1]");
  if (!(picard.tolerance > 0.0)) bad.push_back("solver.tolerance: must be > 0");
  if (picard.max_iters < 1) bad.push_back("solver.max_iters: must be >= 1");
  if (!(smallness > 0.0)) bad.push_back("solver.smallness: must be > 0");
  if (!(epsilon > 0.0)) bad.push_back("probes.epsilon: must be > 0");
  if (order < 1 || order > 3) bad.push_back("probes.order: must be 1, 2 or 3");
  if (probes.empty()) bad.push_back("probes.zetas: at least one probe required");
  for (const auto& z : probes)
    for (int j = 0; j < 3; ++j)
      if (2 * std::abs(z[j]) >= points) bad.push_back("probes.zetas: entry beyond Nyquist");
  if (cutoff < 0 || 2 * cutoff >= points) bad.push_back("recovery.cutoff: must lie in [0, points/2)");
  for (int c : cutoff_sweep)
    if (c < 0 || 2 * c >= points) bad.push_back("recovery.cutoff_sweep: entry out of range");
  if (!(tikhonov >= 0.0)) bad.push_back("recovery.lambda: must be >= 0");
  if (time_basis < 1) bad.push_back("recovery.time_basis: must be >= 1");
  if (!bad.empty()) {
    std::string msg = "invalid scenario: ";
    for (std::size_t i = 0; i < bad.size(); ++i) msg += (i ? "; " : "") + bad[i];
    throw ValidationError(msg);
  }
}

ScalarField Scenario::initial_density() const { return sample_static(m0, "initial.m0", grid()); }

ScalarField Scenario::F_coefficient(int k) const {
  if (k < 1 || k > static_cast<int>(F.size())) return ScalarField(grid());
  return sample_static(F[static_cast<std::size_t>(k - 1)], "costs.F", grid());
}

SpaceTimeField Scenario::F_coefficient_spacetime(int k) const {
  if (k < 1 || k > static_cast<int>(F.size())) return SpaceTimeField(grid(), time());
  const Expr e = compile(F[static_cast<std::size_t>(k - 1)], "costs.F");
  return SpaceTimeField::sample(grid(), time(), [&](const std::array<double, 3>& x, double t) {
    return e.eval({x[0], x[1], x[2], t});
  });
}

ScalarField Scenario::G_coefficient(int k) const {
  if (k < 1 || k > static_cast<int>(G.size())) return ScalarField(grid());
  return sample_static(G[static_cast<std::size_t>(k - 1)], "costs.G", grid());
}

MfgConfig Scenario::config() const {
  const SpatialGrid g = grid();
  const int K = static_cast<int>(F.size());
  TaylorCost Fc = TaylorCost::zero(CostKind::RunningStatic, g);
  if (running_cost_time_dependent()) {
    std::vector<SpaceTimeField> cs;
    for (int k = 1; k <= K; ++k) cs.push_back(F_coefficient_spacetime(k));
    Fc = TaylorCost::running(std::move(cs));
  } else {
    std::vector<ScalarField> cs;
    for (int k = 1; k <= K; ++k) cs.push_back(F_coefficient(k));
    Fc = TaylorCost::running_static(std::move(cs));
  }
  std::vector<ScalarField> gs;
  for (int k = 1; k <= static_cast<int>(G.size()); ++k) gs.push_back(G_coefficient(k));

  HamiltonianSeries H = HamiltonianSeries::quadratic(g);
  if (hamiltonian == "quadratic-series" || !drift.empty()) {
    std::vector<HamiltonianSeries::Term> terms;
    for (int j = 0; j < dimension; ++j) {
      MultiIndex two{0, 0, 0};
      two[j] = 2;
      terms.push_back({two, ScalarField::constant(g, 1.0)});
      if (!drift.empty() && drift[static_cast<std::size_t>(j)] != 0.0) {
        MultiIndex one{0, 0, 0};
        one[j] = 1;
        terms.push_back({one, ScalarField::constant(g, drift[static_cast<std::size_t>(j)])});
      }
    }
    H = HamiltonianSeries::from_terms(g, 2, std::move(terms));
  }
  MfgConfig cfg{std::move(Fc), TaylorCost::terminal(std::move(gs)), std::move(H), time(),
                picard, smallness, dealias};
  cfg.validate();
  return cfg;
}

ProbePlan Scenario::plan() const {
  ProbePlan p;
  p.probes = probes;
  p.cutoff = cutoff;
  p.tikhonov = tikhonov;
  p.time_basis = time_basis;
  p.policy = policy;
  return p;
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    parse_fail("scenario syntax: " + e.msg, e.mark);
  }
  Scenario s;
  s.hash = sha256_hex(text);
  if (root.IsNull()) return s;
  if (!root.IsMap()) parse_fail("scenario: top level must be a mapping", root.Mark());

  std::vector<std::string> errors;
  reject_unknown(root, "scenario", {"grid", "costs", "initial", "solver", "probes", "recovery", "output"},
                 errors);

  if (auto g = root["grid"]) {
    reject_unknown(g, "grid", {"dimension", "points", "steps", "horizon"}, errors);
    if (g["dimension"]) s.dimension = scalar<int>(g["dimension"], "dimension");
    if (g["points"]) s.points = scalar<int>(g["points"], "points");
    if (g["steps"]) s.steps = scalar<int>(g["steps"], "steps");
    if (g["horizon"]) s.horizon = scalar<double>(g["horizon"], "horizon");
  }
  auto string_list = [&](const YAML::Node& n, const std::string& key) {
    std::vector<std::string> out;
    if (n.IsScalar()) {
      out.push_back(expression_node(n, key));
    } else if (n.IsSequence()) {
      for (const auto& e : n) out.push_back(expression_node(e, key));
    } else {
      parse_fail(key + ": expected a string or a list of strings", n.Mark());
    }
    return out;
  };
  if (auto c = root["costs"]) {
    reject_unknown(c, "costs", {"F", "G", "hamiltonian", "drift"}, errors);
    if (c["F"]) s.F = string_list(c["F"], "costs.F");
    if (c["G"]) s.G = string_list(c["G"], "costs.G");
    if (c["hamiltonian"]) s.hamiltonian = scalar<std::string>(c["hamiltonian"], "hamiltonian");
    if (c["drift"]) s.drift = scalar<std::vector<double>>(c["drift"], "drift");
  }
  if (auto i = root["initial"]) {
    reject_unknown(i, "initial", {"m0"}, errors);
    if (i["m0"]) s.m0 = expression_node(i["m0"], "initial.m0");
  }
  if (auto v = root["solver"]) {
    reject_unknown(v, "solver", {"relaxation", "tolerance", "max_iters", "smallness", "dealias"}, errors);
    if (v["relaxation"]) s.picard.relaxation = scalar<double>(v["relaxation"], "relaxation");
    if (v["tolerance"]) s.picard.tolerance = scalar<double>(v["tolerance"], "tolerance");
    if (v["max_iters"]) s.picard.max_iters = scalar<int>(v["max_iters"], "max_iters");
    if (v["smallness"]) s.smallness = scalar<double>(v["smallness"], "smallness");
    if (v["dealias"]) s.dealias = scalar<bool>(v["dealias"], "dealias");
  }
  if (auto p = root["probes"]) {
    reject_unknown(p, "probes", {"zetas", "epsilon", "order", "source"}, errors);
    if (auto z = p["zetas"]) {
      if (!z.IsSequence()) parse_fail("zetas: expected a list", z.Mark());
      s.probes.clear();
      for (const auto& e : z) {
        Wavevector w{0, 0, 0};
        if (e.IsScalar()) {
          w[0] = scalar<int>(e, "zetas");
        } else {
          const auto v = scalar<std::vector<int>>(e, "zetas");
          if (v.size() > 3) parse_fail("zetas: at most three components", e.Mark());
          for (std::size_t j = 0; j < v.size(); ++j) w[j] = v[j];
        }
        s.probes.push_back(w);
      }
    }
    if (p["epsilon"]) s.epsilon = scalar<double>(p["epsilon"], "epsilon");
    if (p["order"]) s.order = scalar<int>(p["order"], "order");
    if (auto src = p["source"]) {
      const auto v = scalar<std::string>(src, "source");
      if (v == "fd")
        s.source = DataSource::FiniteDifference;
      else if (v == "direct")
        s.source = DataSource::Direct;
      else if (v == "synthetic")
        s.source = DataSource::Synthetic;
      else
        errors.push_back("probes.source: expected fd, direct or synthetic");
    }
  }
  if (auto r = root["recovery"]) {
    reject_unknown(r, "recovery", {"cutoff", "lambda", "time_basis", "policy", "cutoff_sweep"}, errors);
    if (r["cutoff"]) s.cutoff = scalar<int>(r["cutoff"], "cutoff");
    if (r["lambda"]) s.tikhonov = scalar<double>(r["lambda"], "lambda");
    if (r["time_basis"]) s.time_basis = scalar<int>(r["time_basis"], "time_basis");
    if (r["cutoff_sweep"]) s.cutoff_sweep = scalar<std::vector<int>>(r["cutoff_sweep"], "cutoff_sweep");
    if (auto pol = r["policy"]) {
      const auto v = scalar<std::string>(pol, "policy");
      if (v == "clamp")
        s.policy = CutoffPolicy::Clamp;
      else if (v == "strict")
        s.policy = CutoffPolicy::Strict;
      else
        errors.push_back("recovery.policy: expected clamp or strict");
    }
  }
  if (auto o = root["output"]) {
    reject_unknown(o, "output", {"directory", "seed"}, errors);
    if (o["directory"]) s.output_dir = scalar<std::string>(o["directory"], "directory");
    if (o["seed"]) s.seed = scalar<unsigned>(o["seed"], "seed");
  }
  if (!errors.empty()) {
    std::string msg = "invalid scenario: ";
    for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
    throw ValidationError(msg);
  }
  s.validate();
  // Compile every expression once so bad syntax surfaces before any solve.
  for (std::size_t k = 0; k < s.F.size(); ++k) compile(s.F[k], "costs.F[" + std::to_string(k) + "]");
  for (std::size_t k = 0; k < s.G.size(); ++k) compile(s.G[k], "costs.G[" + std::to_string(k) + "]");
  compile(s.m0, "initial.m0");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("scenario: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace mfginv::harness
