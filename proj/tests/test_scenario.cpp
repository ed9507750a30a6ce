#include <gtest/gtest.h>

#include "g2flow/scenario.hpp"

using namespace g2flow;

namespace {

json baseConfig() {
  return json::parse(R"({
    "family": "generic-perturbation",
    "params": {"epsilon": 0.05},
    "basepoint": [0.1, -0.2, 0.05, 0.0, 0.15, -0.1, 0.2],
    "seed": 7,
    "samples": 5,
    "checks": ["torsion", "torsion-routes", "conformal-law", "bianchi", "curvature-from-torsion", "flow-fd", "diffeo-flow"]
  })");
}

ErrorCode codeOf(const json& j) {
  try {
    parseConfig(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::RankOverflow;  // sentinel: no error
}

}  // namespace

TEST(Scenario, ConfigValidation) {
  json j = baseConfig();
  j["checks"].push_back("no-such-check");
  EXPECT_EQ(codeOf(j), ErrorCode::UnknownCheck);
  j = baseConfig();
  j["extra"] = 1;
  EXPECT_EQ(codeOf(j), ErrorCode::InvalidConfig);
  j = baseConfig();
  j["basepoint"] = {1, 2, 3};
  EXPECT_EQ(codeOf(j), ErrorCode::InvalidConfig);
  j = baseConfig();
  j["family"] = "squashed";
  EXPECT_EQ(codeOf(j), ErrorCode::InvalidConfig);
  j = baseConfig();
  j["flow"] = json::parse(R"({"h": [{"index": [0, 9], "field": []}]})");
  EXPECT_EQ(codeOf(j), ErrorCode::InvalidConfig);
  j = baseConfig();
  j["flow"] = json::parse(R"({"X": [{"index": [2], "field": [{"term": [1,0,0,0,0,0,0]}]}]})");
  EXPECT_EQ(codeOf(j), ErrorCode::InvalidConfig);
  EXPECT_THROW(parseConfigText("{\"family\": "), Error);
}

TEST(Scenario, NonPositiveFamilyRejected) {
  json j = baseConfig();
  j["family"] = "conformal";
  j["params"] = json::parse(R"({"f": [{"term": [0,0,0,0,0,0,0], "coeff": 0.0}]})");
  try {
    generateFamily(parseConfig(j));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositive);
  }
}

TEST(Scenario, FamiliesBehaveAsExpected) {
  json j = baseConfig();
  j["family"] = "flat";
  EXPECT_LT(maxAbs(analyze(generateFamily(parseConfig(j))).torsion.T), 1e-14);

  j["family"] = "conformal";
  j["basepoint"] = {0, 0, 0, 0, 0, 0, 0};
  const JetGeometry c = analyze(generateFamily(parseConfig(j)));
  EXPECT_NEAR(c.torsion.tau1(0), 0.1, 1e-14);  // d log(1 + 0.1x¹) at the origin
  EXPECT_LT(std::abs(c.torsion.tau0) + maxAbs(c.torsion.tau2) + maxAbs(c.torsion.tau3), 1e-14);

  j["family"] = "linear-pullback";
  const JetGeometry p = analyze(generateFamily(parseConfig(j)));
  EXPECT_LT(maxAbs(p.torsion.T), 1e-14);
  EXPECT_GT(maxAbsDiff(p.frame.g, frameFromPhi(phi0()).g), 1e-2);
}

TEST(Scenario, AllChecksPassOnGenericFamily) {
  const Report r = runScenario(parseConfig(baseConfig()));
  ASSERT_EQ(r.checks.size(), 7u);
  for (const auto& c : r.checks) EXPECT_EQ(c.status, Status::Pass) << c.name << " " << c.maxResidual;
  EXPECT_EQ(r.exitCode(), 0);
}

TEST(Scenario, DeterministicReports) {
  const ScenarioConfig c = parseConfig(baseConfig());
  const std::string a = reportJson(runScenario(c), false).dump();
  const std::string b = reportJson(runScenario(c), false).dump();
  EXPECT_EQ(a, b);
  json other = baseConfig();
  other["seed"] = 8;
  EXPECT_NE(reportJson(runScenario(parseConfig(other)), false).dump(), a);
}

TEST(Scenario, EmptyCheckListIsValid) {
  json j = baseConfig();
  j["checks"] = json::array();
  const Report r = runScenario(parseConfig(j));
  EXPECT_TRUE(r.checks.empty());
  EXPECT_EQ(r.exitCode(), 0);
  EXPECT_TRUE(json::parse(emitReport(r, "json"))["checks"].empty());
}

TEST(Scenario, FailingCheckIsFlagged) {
  json j = baseConfig();
  j["checks"] = {"identity-suite"};
  j["tolerances"] = {{"identity-suite", 1e-30}};
  const Report r = runScenario(parseConfig(j));
  EXPECT_EQ(r.checks[0].status, Status::Fail);
  EXPECT_EQ(r.exitCode(), 1);
  EXPECT_NE(emitReport(r, "text").find("<-- FAIL"), std::string::npos);
}

TEST(Scenario, PerturbedRateIsADeviation) {
  json j = baseConfig();
  j["checks"] = {"flow-fd"};
  RunOptions opt;
  // Flip the sign of one contribution to the τ₂ rate.
  opt.adjustRates = [](std::vector<Tracked>& rates) {
    for (auto& q : rates)
      if (q.name == "tau2") q.value(0, 1) += 0.05, q.value(1, 0) -= 0.05;
  };
  const Report r = runScenario(parseConfig(j), opt);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].status, Status::Deviation);
  EXPECT_EQ(r.exitCode(), 1);
  const json rep = json::parse(emitReport(r, "json"));
  EXPECT_EQ(rep["checks"][0]["status"], "deviation");
  EXPECT_FALSE(rep["checks"][0]["details"]["quantities"]["tau2"]["orderOk"].get<bool>());
  EXPECT_TRUE(rep["checks"][0]["details"]["quantities"]["tau3"]["orderOk"].get<bool>());
  EXPECT_NE(emitReport(r, "text").find("<-- deviation"), std::string::npos);
}

TEST(Scenario, StaticConformalFlowReportsOrderTwo) {
  json j = baseConfig();
  j["family"] = "flat";
  j["checks"] = {"flow-fd"};
  json h = json::array();
  for (int i = 0; i < kDim; ++i)
    h.push_back({{"index", {i, i}}, {"field", json::array({{{"term", {0, 0, 0, 0, 0, 0, 0}}, {"coeff", 0.3}}})}});
  j["flow"] = {{"h", h}};
  const Report r = runScenario(parseConfig(j));
  ASSERT_EQ(r.checks[0].status, Status::Pass) << r.checks[0].details.dump();
  const json& q = r.checks[0].details["quantities"];
  EXPECT_TRUE(q["g"]["order"].is_null());  // g is linear in t here
  EXPECT_NEAR(q["gInv"]["order"].get<double>(), 2.0, 0.3);
  EXPECT_NEAR(q["vol"]["order"].get<double>(), 2.0, 0.3);
}
