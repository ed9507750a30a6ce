#include <gtest/gtest.h>

#include "g2flow/flow.hpp"

using namespace g2flow;

namespace {

StructureJet perturbedJet(std::uint64_t seed, const Point& x) { return randomPerturbationJet(seed, x, 0.1); }

Point pointFor(std::uint64_t seed) {
  CounterRng r(seed, 9);
  Point p;
  for (double& v : p) v = 0.3 * r.uniform();
  return p;
}

}  // namespace

TEST(Flow, RhsSpecialCases) {
  const StructureJet s = perturbedJet(1, pointFor(1));
  const G2FrameT<Jet2> f = frameFromPhi(s.phi);
  FlowFields zero;
  EXPECT_EQ(maxAbs(valuePart(generalFlowRHS(s.phi, zero))), 0.0);
  FlowFields conf;
  for (std::size_t i = 0; i < conf.h.size(); ++i) conf.h[i] = f.g[i] * 0.7;
  const auto rhs = generalFlowRHS(s.phi, conf);
  EXPECT_LT(maxAbsDiff(valuePart(rhs), valuePart(s.phi) * 2.1), 1e-12);
  FlowFields xonly;
  for (int i = 0; i < kDim; ++i) xonly.x(i) = Jet2(0.1 * i - 0.3);
  const auto split = decomposeThreeForm(frameValue(f), valuePart(generalFlowRHS(s.phi, xonly)));
  EXPECT_LT(maxAbs(split.h), 1e-12);
  EXPECT_LT(maxAbsDiff(split.X, valuePart(xonly.x)), 1e-12);
}

TEST(Flow, ConformalFlowHasExactSolution) {
  // h = λg gives g(t) = e^{2λt} g(0).
  const StructureJet s0 = perturbedJet(2, pointFor(2));
  const double lambda = 0.4;
  FlowState st{0.0, s0};
  // h tracks the evolving metric, so the RHS is built from the state itself.
  auto advance = [&](const FlowState& s, double dt) {
    auto rhs = [&](const BasicTensor<Jet2>& p) {
      FlowFields ff;
      const auto f = frameFromPhi(p);
      for (std::size_t i = 0; i < ff.h.size(); ++i) ff.h[i] = f.g[i] * lambda;
      return generalFlowRHS(p, ff);
    };
    FlowState o = s;
    const auto& y = s.phi.phi;
    auto k1 = rhs(y), k2 = rhs(detail::axpy(y, k1, dt / 2)), k3 = rhs(detail::axpy(y, k2, dt / 2)),
         k4 = rhs(detail::axpy(y, k3, dt));
    for (std::size_t i = 0; i < y.size(); ++i) o.phi.phi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    o.t += dt;
    return o;
  };
  auto err = [&](int n) {
    FlowState s = st;
    for (int i = 0; i < n; ++i) s = advance(s, 0.5 / n);
    const MultiTensor g0 = frameFromPhi(valuePart(s0.phi)).g;
    return maxAbsDiff(frameFromPhi(valuePart(s.phi.phi)).g, g0 * std::exp(2 * lambda * 0.5));
  };
  const double e1 = err(10), e2 = err(20);
  EXPECT_LT(e1, 1e-6);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
}

TEST(Flow, Rk4BeatsEuler) {
  const Point x = pointFor(3);
  const FlowSpec spec = genericFlowSpec(3, x);
  const FlowState s{0.0, perturbedJet(3, x)};
  const FlowState ref = integrate(s, spec, 1e-3, 200);
  const FlowState a = integrate(s, spec, 2e-2, 10, StepMethod::Rk4);
  const FlowState b = integrate(s, spec, 2e-2, 10, StepMethod::Euler);
  const double ea = maxAbsDiff(valuePart(a.phi.phi), valuePart(ref.phi.phi));
  const double eb = maxAbsDiff(valuePart(b.phi.phi), valuePart(ref.phi.phi));
  EXPECT_LT(ea * 100.0, eb);
}

TEST(Flow, StepRejectsBadInput) {
  const Point x = pointFor(4);
  const FlowState s{0.0, perturbedJet(4, x)};
  const FlowSpec spec = genericFlowSpec(4, x);
  EXPECT_THROW(step(s, spec, 0.0), Error);
  FlowSpec shallow = spec;
  shallow.jetDepth = 1;
  EXPECT_THROW(step(s, shallow, 1e-3), Error);
  // A strongly contracting flow drives the metric out of the positive cone.
  FlowSpec crush;
  crush.fields = [](double) {
    FlowFields f;
    for (int i = 0; i < kDim; ++i) f.h(i, i) = Jet2(-50.0);
    return f;
  };
  try {
    integrate(s, crush, 0.05, 100, StepMethod::Euler);
    FAIL() << "expected PositivityLost";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PositivityLost);
  }
}

TEST(Flow, PredictedRatesMatchFiniteDifferences) {
  for (std::uint64_t seed = 10; seed < 12; ++seed) {
    const Point x = pointFor(seed);
    const FlowSpec spec = genericFlowSpec(seed, x);
    const EvolutionReport rep = fdCheck(FlowState{0.0, perturbedJet(seed, x)}, spec);
    for (const auto& q : rep.quantities) {
      EXPECT_NEAR(q.order, 2.0, 0.3) << q.name << " residuals " << q.residuals[0] << ", " << q.residuals[1];
      EXPECT_LT(q.residuals[2], 1e-6) << q.name;
    }
  }
}

TEST(Flow, XOnlyFlowPreservesMetric) {
  const Point x = pointFor(20);
  const FlowSpec spec = genericFlowSpec(20, x, 0.3, false, true);
  const FlowState s0{0.0, perturbedJet(20, x)};
  const FlowState s1 = integrate(s0, spec, 1e-3, 10);
  const JetGeometry a = analyze(s0.phi), b = analyze(s1.phi);
  EXPECT_LT(maxAbsDiff(a.frame.g, b.frame.g), 1e-9);
  EXPECT_LT(maxAbsDiff(a.frame.gInv, b.frame.gInv), 1e-9);
  EXPECT_LT(std::abs(a.frame.sqrtDetG - b.frame.sqrtDetG), 1e-9);
  EXPECT_LT(maxAbsDiff(a.frame.B, b.frame.B), 1e-9);
  EXPECT_LT(maxAbsDiff(a.conn.gamma, b.conn.gamma), 1e-9);
  EXPECT_GT(maxAbsDiff(a.frame.phi, b.frame.phi), 1e-4);
  const auto rates = predictedRates(s0, spec);
  EXPECT_EQ(maxAbs(rates[0].value), 0.0);
  EXPECT_EQ(maxAbs(rates[2].value), 0.0);
}

TEST(Flow, PsiComponentRatios) {
  const Point x = pointFor(30);
  const JetGeometry G = analyze(perturbedJet(30, x));
  const PsiRatioResidual r = psiComponentRatios(G, genericFlowSpec(30, x).fields(0.0));
  EXPECT_LT(r.worst(), 1e-9) << r.one << ' ' << r.seven << ' ' << r.twentySeven;
}

TEST(Flow, DiffeomorphismFlowGivesLieDerivativeOfTorsion) {
  for (std::uint64_t seed = 40; seed < 43; ++seed) {
    const Point x = pointFor(seed);
    const JetGeometry G = analyze(perturbedJet(seed, x));
    CounterRng r(seed, 5);
    const TensorField y = randomPolynomialField(r, "u", 0.5);
    EXPECT_LT(diffeoTorsionResidual(G, y.jetAt(x)), 1e-8);
  }
  // Rotation generator on flat φ₀: h = 0.
  const JetGeometry F = analyze(structureJetAt(Point{}, [](const auto&) {
    return phi0().map([](double v) { return Jet2(v); });
  }));
  auto xs = coordinateJets(Point{});
  BasicTensor<Jet2> Y("u");
  Y(0) = xs[1] * -1.0;
  Y(1) = xs[0];
  const DiffeoSplit<double> d = diffeoDecomposition(F, Y);
  EXPECT_LT(maxAbs(d.h), 1e-14);
  EXPECT_GT(maxAbs(d.X), 0.1);
}
