#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "g2flow/scenario.hpp"

using namespace g2flow;

namespace {

enum class Verbosity { Quiet, Info, Debug };

Verbosity verbosity() {
  const char* v = std::getenv("G2FLOW_LOG");
  if (!v) return Verbosity::Quiet;
  const std::string s(v);
  if (s == "debug") return Verbosity::Debug;
  if (s == "info") return Verbosity::Info;
  return Verbosity::Quiet;
}

void log(Verbosity level, const std::string& msg) {
  if (verbosity() >= level) std::cerr << "[g2flow] " << msg << "\n";
}

json loadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }
}

void writeOut(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
  out << text;
}

int inputError(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 2;
}

struct CheckArgs {
  std::string config, out, format = "text";
  long long seed = -1;
  int samples = 0;
};

int runCheck(const CheckArgs& a) {
  json j = loadJson(a.config);
  if (j.is_object() && a.seed >= 0) j["seed"] = static_cast<std::uint64_t>(a.seed);
  if (j.is_object() && a.samples > 0) j["samples"] = a.samples;
  const ScenarioConfig cfg = parseConfig(j);
  log(Verbosity::Info, "running " + std::to_string(cfg.checks.size()) + " checks, seed " + std::to_string(cfg.seed));
  const Report rep = runScenario(cfg);
  for (const auto& c : rep.checks) log(Verbosity::Debug, c.name + ": " + statusName(c.status));
  writeOut(emitReport(rep, a.format), a.out);
  return rep.exitCode();
}

int listChecks() {
  for (const auto& c : checkCatalog()) std::printf("%-24s tol %-7.0e %s\n", c.name, c.tolerance, c.description);
  return 0;
}

struct FlowArgs {
  std::string config, out, format = "text", method = "rk4";
  double dt = 1e-3;
  int steps = 10;
  bool fdCheck = false;
};

int runFlow(const FlowArgs& a) {
  ScenarioConfig cfg = parseConfig(loadJson(a.config));
  if (!(a.dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "--dt must be positive");
  if (a.steps < 0) throw Error(ErrorCode::InvalidConfig, "--steps must be nonnegative");
  const StepMethod method = detail::stepMethod(a.method);
  const FlowSpec spec = flowSpecFor(cfg);
  FlowState s{0.0, generateFamily(cfg)};

  json traj = json::array();
  auto record = [&](const FlowState& st) {
    const JetGeometry G = analyze(st.phi);
    traj.push_back({{"t", st.t},
                    {"minMetricEigenvalue", minEigenvalue(G.frame.g)},
                    {"vol", G.frame.sqrtDetG},
                    {"tau0", G.torsion.tau0},
                    {"maxAbsT", maxAbs(G.torsion.T)},
                    {"scalarCurvature", G.curv.scalar}});
  };
  record(s);
  std::string failure;
  try {
    for (int i = 0; i < a.steps; ++i) {
      s = step(s, spec, a.dt, method);
      record(s);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PositivityLost) throw;
    failure = e.what();
  }

  json fd = nullptr;
  bool fdOk = true;
  if (a.fdCheck && failure.empty()) {
    const EvolutionReport rep = fdCheck(s, spec, cfg.flow.fdSteps);
    fd = json::object();
    for (const auto& q : rep.quantities) {
      const bool ok = q.residuals.back() < 1e-6 &&
                      (std::abs(q.order - 2.0) <= cfg.flow.orderTolerance || q.residuals[1] < 1e-10 * std::max(1.0, q.predictedNorm));
      fdOk = fdOk && ok;
      fd[q.name] = {{"residuals", q.residuals}, {"order", std::isnan(q.order) ? json(nullptr) : json(q.order)}, {"ok", ok}};
    }
  }

  const int code = failure.empty() && fdOk ? 0 : 1;
  if (a.format == "json") {
    json out{{"trajectory", traj}, {"method", a.method}, {"dt", a.dt}, {"steps", a.steps}};
    if (!failure.empty()) out["failure"] = failure;
    if (a.fdCheck) out["fdCheck"] = fd;
    writeOut(out.dump(2) + "\n", a.out);
  } else if (a.format == "text") {
    std::ostringstream os;
    char line[200];
    std::snprintf(line, sizeof line, "%10s %14s %14s %14s %14s %14s\n", "t", "min eig g", "vol", "tau0", "max|T|", "scalar");
    os << line;
    for (const auto& r : traj) {
      std::snprintf(line, sizeof line, "%10.4f %14.6e %14.6e %14.6e %14.6e %14.6e\n", r["t"].get<double>(),
                    r["minMetricEigenvalue"].get<double>(), r["vol"].get<double>(), r["tau0"].get<double>(),
                    r["maxAbsT"].get<double>(), r["scalarCurvature"].get<double>());
      os << line;
    }
    if (!failure.empty()) os << "stopped: " << failure << "\n";
    if (a.fdCheck && !fd.is_null()) {
      os << "\nfinite-difference check at t = " << s.t << "\n";
      for (const auto& [name, v] : fd.items()) {
        std::snprintf(line, sizeof line, "  %-9s residual %.3e  order %s  %s\n", name.c_str(),
                      v["residuals"].back().get<double>(),
                      v["order"].is_null() ? "exact" : std::to_string(v["order"].get<double>()).c_str(),
                      v["ok"].get<bool>() ? "ok" : "DEVIATION");
        os << line;
      }
    }
    writeOut(os.str(), a.out);
  } else {
    throw Error(ErrorCode::InvalidConfig, "format must be json or text");
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G2-structure torsion, curvature and flow verification"};
  app.require_subcommand(1);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "run the checks listed in a scenario config");
  check->add_option("--config", ca.config, "scenario config (JSON)")->required();
  check->add_option("--out", ca.out, "write the report here instead of stdout");
  check->add_option("--format", ca.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  check->add_option("--seed", ca.seed, "override the config seed")->check(CLI::NonNegativeNumber);
  check->add_option("--samples", ca.samples, "override the sample count")->check(CLI::PositiveNumber);

  app.add_subcommand("list-checks", "list available checks");

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "integrate the flow from a scenario config");
  flow->add_option("--config", fa.config, "scenario config (JSON)")->required();
  flow->add_option("--dt", fa.dt, "step size");
  flow->add_option("--steps", fa.steps, "number of steps");
  flow->add_option("--method", fa.method, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
  flow->add_flag("--fd-check", fa.fdCheck, "compare predicted rates with finite differences at the final state");
  flow->add_option("--format", fa.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  flow->add_option("--out", fa.out, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return runCheck(ca);
    if (flow->parsed()) return runFlow(fa);
    return listChecks();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PositivityLost) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    return inputError(e);
  } catch (const std::exception& e) {
    return inputError(e);
  }
}
