#pragma once

// The general flow ∂ₜφ = i(h) + X⌟ψ on 2-jets at a base point, closed-form
// evolution rates of the induced quantities, and a central-difference harness.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "g2flow/fields.hpp"
#include "g2flow/jet.hpp"
#include "g2flow/random.hpp"

namespace g2flow {

struct FlowFields {
  BasicTensor<Jet2> h{"dd", Symmetry::symmetric()};
  BasicTensor<Jet2> x{"u"};
};

struct FlowSpec {
  std::string name;
  std::function<FlowFields(double t)> fields;
  bool timeDependent = false;
  int jetDepth = 2;  // derivative order to which the fields are exact
};

struct FlowState {
  double t = 0.0;
  StructureJet phi;
};

enum class StepMethod { Euler, Rk4 };

inline constexpr double kPositivityFloor = 1e-6;

/// p(t) = (1 + a1 t + a2 t²) e^{rate t}
struct TimeProfile {
  double a1 = 0.0, a2 = 0.0, rate = 0.0;
  double operator()(double t) const { return (1.0 + a1 * t + a2 * t * t) * std::exp(rate * t); }
  bool constant() const { return a1 == 0.0 && a2 == 0.0 && rate == 0.0; }
};

/// Flow driven by closed-form fields h(x)·p_h(t) and X(x)·p_X(t) at one point.
inline FlowSpec fieldFlowSpec(std::string name, const TensorField& h, const TensorField& x, const Point& at,
                              TimeProfile ph = {}, TimeProfile px = {}) {
  if (h.slots != "dd" || x.slots != "u") throw Error(ErrorCode::InvalidConfig, "flow fields must be h:dd and X:u");
  FlowFields base;
  base.h = h.jetAt(at);
  base.h.setSymmetry(Symmetry::symmetric());
  requireSymmetric(base.h);
  base.x = x.jetAt(at);
  FlowSpec s;
  s.name = std::move(name);
  s.timeDependent = !(ph.constant() && px.constant());
  s.fields = [base, ph, px](double t) {
    FlowFields f = base;
    const double a = ph(t), b = px(t);
    for (std::size_t i = 0; i < f.h.size(); ++i) f.h[i] = base.h[i] * a;
    for (std::size_t i = 0; i < f.x.size(); ++i) f.x[i] = base.x[i] * b;
    return f;
  };
  return s;
}

/// Quadratic polynomial field with uniform random coefficients in [−scale, scale).
inline TensorField randomPolynomialField(CounterRng& r, const std::string& slots, double scale) {
  TensorField f(slots);
  const bool sym = slots == "dd";
  auto poly = [&] {
    ScalarField s;
    s.terms.push_back(FieldTerm{{}, scale * r.uniform(), {}});
    for (int i = 0; i < kDim; ++i) {
      FieldTerm t;
      t.power[i] = 1;
      t.coeff = scale * r.uniform();
      s.terms.push_back(t);
      for (int j = i; j < kDim; ++j) {
        FieldTerm q;
        q.power[i] += 1;
        q.power[j] += 1;
        q.coeff = 0.5 * scale * r.uniform();
        s.terms.push_back(q);
      }
    }
    return s;
  };
  if (sym) {
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) setSymmetric(f, i, j, poly());
  } else {
    for (auto& c : f.comps) c = poly();
  }
  return f;
}

/// φ₀ + i₀(h(x)) + X(x)⌟ψ₀ with the maps of the standard structure.
inline StructureJet perturbationJet(const TensorField& h, const TensorField& X, const Point& x) {
  const G2Frame f0 = frameFromPhi(phi0());
  auto phi = [&](const std::array<Jet2, kDim>& xs) {
    const BasicTensor<Jet2> hj = h.evaluateAt(xs), xj = X.evaluateAt(xs);
    BasicTensor<Jet2> p = f0.phi.map([](double v) { return Jet2(v); });
    forEachIndex(3, [&](const std::array<int, 4>& i, std::size_t flat) {
      Jet2 v(0.0);
      for (int l = 0; l < kDim; ++l)
        v += hj(l, i[0]) * f0.phi(l, i[1], i[2]) + hj(l, i[1]) * f0.phi(i[0], l, i[2]) +
             hj(l, i[2]) * f0.phi(i[0], i[1], l) + xj(l) * f0.psi(l, i[0], i[1], i[2]);
      p[flat] += v;
    });
    return p;
  };
  return structureJetAt(x, phi);
}

/// Random quadratic perturbation of size ε, fully determined by the seed.
inline StructureJet randomPerturbationJet(std::uint64_t seed, const Point& x, double eps) {
  CounterRng r(seed, 3);
  const TensorField h = randomPolynomialField(r, "dd", eps);
  const TensorField X = randomPolynomialField(r, "u", eps);
  return perturbationJet(h, X, x);
}

/// Random time-dependent (h, X) flow at a point.
inline FlowSpec genericFlowSpec(std::uint64_t seed, const Point& at, double scale = 0.3, bool withH = true,
                                bool withX = true) {
  CounterRng r(seed, 7);
  TensorField h = withH ? randomPolynomialField(r, "dd", scale) : TensorField("dd");
  TensorField x = withX ? randomPolynomialField(r, "u", scale) : TensorField("u");
  const TimeProfile ph{0.8 * r.uniform(), 2.0 + r.uniform(), 0.5 * r.uniform()};
  const TimeProfile px{0.8 * r.uniform(), -2.0 + r.uniform(), 0.5 * r.uniform()};
  return fieldFlowSpec("generic-" + std::to_string(seed), h, x, at, ph, px);
}

inline G2FrameT<Jet2> checkedFrame(const BasicTensor<Jet2>& phi) {
  try {
    G2FrameT<Jet2> f = frameFromPhi(phi);
    if (minEigenvalue(valuePart(f.g)) < kPositivityFloor)
      throw Error(ErrorCode::PositivityLost, "metric eigenvalue fell below the positivity floor");
    return f;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositive || e.code() == ErrorCode::DegenerateB)
      throw Error(ErrorCode::PositivityLost, e.what());
    throw;
  }
}

/// ∂ₜφ_ijk = h^l_i φ_ljk + h^l_j φ_ilk + h^l_k φ_ijl + X^l ψ_lijk, as a 2-jet.
inline BasicTensor<Jet2> generalFlowRHS(const BasicTensor<Jet2>& phi, const FlowFields& ff) {
  const G2FrameT<Jet2> f = checkedFrame(phi);
  BasicTensor<Jet2> r = iMapUnchecked(f, ff.h) + vectorIntoPsi(f, ff.x);
  r.setSymmetry(Symmetry::skew());
  return r;
}

inline BasicTensor<Jet2> generalFlowRHS(const FlowState& s, const FlowSpec& spec) {
  return generalFlowRHS(s.phi.phi, spec.fields(s.t));
}

namespace detail {
inline BasicTensor<Jet2> axpy(const BasicTensor<Jet2>& y, const BasicTensor<Jet2>& k, double a) {
  BasicTensor<Jet2> r = y;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += k[i] * a;
  return r;
}

/// One explicit step with signed dt.
inline FlowState advance(const FlowState& s, const FlowSpec& spec, double dt, StepMethod m) {
  const auto rhs = [&](const BasicTensor<Jet2>& p, double t) { return generalFlowRHS(p, spec.fields(t)); };
  const BasicTensor<Jet2>& y = s.phi.phi;
  FlowState out = s;
  out.t = s.t + dt;
  if (m == StepMethod::Euler) {
    out.phi.phi = axpy(y, rhs(y, s.t), dt);
  } else {
    const auto k1 = rhs(y, s.t);
    const auto k2 = rhs(axpy(y, k1, dt / 2), s.t + dt / 2);
    const auto k3 = rhs(axpy(y, k2, dt / 2), s.t + dt / 2);
    const auto k4 = rhs(axpy(y, k3, dt), s.t + dt);
    BasicTensor<Jet2> n = y;
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    out.phi.phi = n;
  }
  out.phi.phi.setSymmetry(Symmetry::skew());
  checkedFrame(out.phi.phi);
  return out;
}
}  // namespace detail

inline FlowState step(const FlowState& s, const FlowSpec& spec, double dt, StepMethod m = StepMethod::Rk4) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "step size must be positive");
  if (spec.jetDepth < 2) throw Error(ErrorCode::InvalidConfig, "flow fields are not exact to second order");
  return detail::advance(s, spec, dt, m);
}

inline FlowState integrate(FlowState s, const FlowSpec& spec, double dt, int steps, StepMethod m = StepMethod::Rk4) {
  for (int i = 0; i < steps; ++i) s = step(s, spec, dt, m);
  return s;
}

// ---------------------------------------------------------------------------
// Tracked quantities

struct Tracked {
  std::string name;
  MultiTensor value;
};

inline const std::vector<std::string>& trackedNames() {
  static const std::vector<std::string> names{"g",   "gInv", "vol",  "B",    "Gamma",    "psi", "T",
                                              "tau0", "tau1", "tau2", "tau3", "nablaPhi", "PC"};
  return names;
}

/// Current values, in the order of trackedNames(); τ₁ is its Ω²₇ 2-form.
inline std::vector<Tracked> trackedValues(const JetGeometry& G) {
  const G2Frame& f = G.frame;
  const TorsionData& t = G.torsion;
  MultiTensor C("dd");
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) C(i, j) = 0.5 * (t.T(i, j) - t.T(j, i));
  return {{"g", f.g},
          {"gInv", f.gInv},
          {"vol", MultiTensor::scalar(f.sqrtDetG)},
          {"B", f.B},
          {"Gamma", G.conn.gamma},
          {"psi", f.psi},
          {"T", t.T},
          {"tau0", MultiTensor::scalar(t.tau0)},
          {"tau1", t.tau1Form},
          {"tau2", t.tau2},
          {"tau3", t.tau3},
          {"nablaPhi", valuePart(G.nablaPhi)},
          {"PC", psiAction(f, C)}};
}

/// Ingredients of the rate formulas at the base point.
struct FlowInputs {
  MultiTensor h{"dd"}, hm{"ud"}, hUp{"uu"};
  MultiTensor X{"u"}, Xl{"d"}, Xmat{"dd"};
  MultiTensor dh{"ddd"};   // ∇_k h_ij
  MultiTensor dXl{"dd"};   // ∇_p X_q
  MultiTensor dXu{"du"};   // ∇_l X^m
  double trh = 0.0, divX = 0.0;

  FlowInputs(const JetGeometry& G, const FlowFields& ff) {
    const G2Frame& f = G.frame;
    h = valuePart(ff.h);
    hm = mixed(f, h);
    hUp = raiseSlot(f, hm, 1);
    X = valuePart(ff.x);
    Xl = lower1(f, X);
    Xmat = vectorToTwoForm(f, X);
    dh = covariantDerivative(G.conn, truncate(ff.h));
    const BasicTensor<Jet1> x1 = truncate(ff.x);
    dXu = covariantDerivative(G.conn, x1);
    dXl = covariantDerivative(G.conn, lower1(G.frame1, x1));
    trh = traceG(f, h);
    divX = traceG(f, dXl);
  }
};

/// ∂ₜT_pq = T_pl g^{lm} h_mq + T_pl g^{lm} X_mq + (∇_k h_lp) g^{ka} g^{lb} φ_abq + ∇_p X_q.
inline MultiTensor torsionRate(const JetGeometry& G, const FlowInputs& in, MultiTensor* curlOut = nullptr) {
  const G2Frame& f = G.frame;
  // curl(p,q) = (∇_k h_lp) g^{ka} g^{lb} φ_abq
  const MultiTensor pu = raiseSlot(f, raiseSlot(f, f.phi, 0), 1);
  MultiTensor curl("dd");
  for (int p = 0; p < kDim; ++p)
    for (int q = 0; q < kDim; ++q) {
      double v = 0.0;
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) v += in.dh(k, l, p) * pu(k, l, q);
      curl(p, q) = v;
    }
  if (curlOut) *curlOut = curl;
  return matMulG(f, G.torsion.T, in.h) + matMulG(f, G.torsion.T, in.Xmat) + curl + in.dXl;
}

/// Closed-form rates of every tracked quantity under (h, X), same order as trackedValues.
inline std::vector<Tracked> predictedRates(const JetGeometry& G, const FlowFields& ff) {
  const G2Frame& f = G.frame;
  const TorsionData& t = G.torsion;
  const FlowInputs in(G, ff);
  const MultiTensor& h = in.h;
  const MultiTensor& hm = in.hm;
  const MultiTensor& Xm = in.Xmat;
  const double trh = in.trh;

  MultiTensor B("dd");
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double v = trh * f.B(i, j);
      for (int l = 0; l < kDim; ++l) v += hm(l, i) * f.B(l, j) + hm(l, j) * f.B(i, l);
      B(i, j) = v;
    }

  MultiTensor gam("udd");
  forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [k, i, j, u] = x;
    double v = 0.0;
    for (int l = 0; l < kDim; ++l) v += f.gInv(k, l) * (in.dh(i, j, l) + in.dh(j, i, l) - in.dh(l, i, j));
    gam[flat] = v;
  });

  MultiTensor psi("dddd");
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [i, j, k, l] = x;
    double v = 0.0;
    for (int m = 0; m < kDim; ++m)
      v += hm(m, i) * f.psi(m, j, k, l) + hm(m, j) * f.psi(i, m, k, l) + hm(m, k) * f.psi(i, j, m, l) +
           hm(m, l) * f.psi(i, j, k, m);
    v += -in.Xl(i) * f.phi(j, k, l) + in.Xl(j) * f.phi(i, k, l) - in.Xl(k) * f.phi(i, j, l) + in.Xl(l) * f.phi(i, j, k);
    psi[flat] = v;
  });

  // ∇_l φ_ijk
  const MultiTensor np = valuePart(G.nablaPhi);
  std::array<MultiTensor, kDim> npsi;
  for (int l = 0; l < kDim; ++l) npsi[l] = nablaPsiAlong(G, l);
  MultiTensor A("ddu");  // A(i,l,m) = g^{ms}(∇_s h_il − ∇_i h_ls)
  forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [i, l, m, u] = x;
    double v = 0.0;
    for (int s = 0; s < kDim; ++s) v += f.gInv(m, s) * (in.dh(s, i, l) - in.dh(i, l, s));
    A[flat] = v;
  });
  MultiTensor dnp("dddd");
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [l, i, j, k] = x;
    double v = 0.0;
    for (int m = 0; m < kDim; ++m) {
      v += hm(m, i) * np(l, m, j, k) + hm(m, j) * np(l, i, m, k) + hm(m, k) * np(l, i, j, m);
      v += in.X(m) * npsi[l](m, i, j, k);
      v += A(i, l, m) * f.phi(m, j, k) + A(j, l, m) * f.phi(i, m, k) + A(k, l, m) * f.phi(i, j, m);
      v += in.dXu(l, m) * f.psi(m, i, j, k);
    }
    dnp[flat] = v;
  });

  MultiTensor curl("dd");
  const MultiTensor dT = torsionRate(G, in, &curl);

  // Shared pieces of the torsion-form rates.
  const double hTau3 = matInner(f, h, t.tau3);
  const double xTau1 = matInner(f, Xm, t.tau1Form);
  const double tau0Rate = -trh * t.tau0 / 7.0 + 4.0 / 7.0 * hTau3 - 4.0 / 7.0 * xTau1 + 4.0 / 7.0 * in.divX;

  auto comm = [&](const MultiTensor& a, const MultiTensor& b) { return commutator(f, a, b); };
  auto anti = [&](const MultiTensor& a, const MultiTensor& b) { return anticommutator(f, a, b); };
  auto p7 = [&](const MultiTensor& b) { return pi7(f, b); };
  auto p14 = [&](const MultiTensor& b) { return pi14(f, b); };

  MultiTensor tau3Rate = f.g * ((-trh * t.tau0 / 28.0 + hTau3 / 7.0 - xTau1 / 7.0 + in.divX / 7.0)) + h * (0.25 * t.tau0) +
                         anti(h, t.tau3) * 0.5 + comm(h, t.tau1Form) * 0.5 - comm(h, t.tau2) * 0.25 -
                         comm(Xm, t.tau3) * 0.5 - anti(Xm, t.tau1Form) * 0.5 + anti(Xm, t.tau2) * 0.25;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      tau3Rate(i, j) += -0.5 * curl(i, j) - 0.5 * curl(j, i) - 0.5 * (in.dXl(i, j) + in.dXl(j, i));

  // w^l φ_lij for the three vectors entering the skew rates.
  MultiTensor divH("d"), dTr("d"), curlX("d");
  const MultiTensor pu = raiseSlot(f, raiseSlot(f, f.phi, 0), 1);
  for (int k = 0; k < kDim; ++k) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int p = 0; p < kDim; ++p)
      for (int q = 0; q < kDim; ++q) {
        a += f.gInv(p, q) * in.dh(p, q, k);
        b += f.gInv(p, q) * in.dh(k, p, q);
        c += in.dXl(p, q) * pu(p, q, k);
      }
    divH(k) = a;
    dTr(k) = b;
    curlX(k) = c;
  }
  const MultiTensor divHf = vectorToTwoForm(f, raise1(f, divH));
  const MultiTensor dTrf = vectorToTwoForm(f, raise1(f, dTr));
  const MultiTensor curlXf = vectorToTwoForm(f, raise1(f, curlX));

  MultiTensor tau1Rate =
      p7(comm(h, t.tau3) * 0.5 + anti(h, t.tau1Form) * 0.5 + anti(h, t.tau2) * 0.25) + p14(anti(h, t.tau1Form)) +
      Xm * (0.25 * t.tau0) + p7(anti(Xm, t.tau3) * -0.5 - comm(Xm, t.tau1Form) * 0.5 + comm(Xm, t.tau2) * (1.0 / 12.0)) +
      p14(comm(Xm, t.tau1Form) * (-1.0 / 3.0)) - divHf * (1.0 / 6.0) + dTrf * (1.0 / 6.0) + curlXf * (1.0 / 6.0);

  MultiTensor tau2Rate = p7(anti(h, t.tau2)) + p14(comm(h, t.tau3) * -1.0 + anti(h, t.tau1Form) + anti(h, t.tau2) * 0.5) +
                         p7(comm(Xm, t.tau2) * (-1.0 / 3.0)) + p14(anti(Xm, t.tau3) + comm(Xm, t.tau1Form) * (1.0 / 3.0)) -
                         divHf * (1.0 / 3.0) + dTrf * (1.0 / 3.0) + curlXf * (1.0 / 3.0);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) tau2Rate(i, j) += -curl(i, j) + curl(j, i) - in.dXl(i, j) + in.dXl(j, i);

  // ∂ₜP(C) = P(∂ₜC) + 6π₇{h,C₁₄} − 6π₁₄{h,C₇} − 2π₇[X,C₁₄] + 2π₁₄[X,C₇]
  MultiTensor C("dd"), dC("dd");
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      C(i, j) = 0.5 * (t.T(i, j) - t.T(j, i));
      dC(i, j) = 0.5 * (dT(i, j) - dT(j, i));
    }
  const MultiTensor C7 = p7(C), C14 = p14(C);
  const MultiTensor pcRate = psiAction(f, dC) + p7(anti(h, C14)) * 6.0 - p14(anti(h, C7)) * 6.0 -
                             p7(comm(Xm, C14)) * 2.0 + p14(comm(Xm, C7)) * 2.0;

  return {{"g", h * 2.0},
          {"gInv", in.hUp * -2.0},
          {"vol", MultiTensor::scalar(trh * f.sqrtDetG)},
          {"B", B},
          {"Gamma", gam},
          {"psi", psi},
          {"T", dT},
          {"tau0", MultiTensor::scalar(tau0Rate)},
          {"tau1", tau1Rate},
          {"tau2", tau2Rate},
          {"tau3", tau3Rate},
          {"nablaPhi", dnp},
          {"PC", pcRate}};
}

inline std::vector<Tracked> predictedRates(const FlowState& s, const FlowSpec& spec) {
  return predictedRates(analyze(s.phi), spec.fields(s.t));
}

// ---------------------------------------------------------------------------
// Finite-difference verification

struct QuantityCheck {
  std::string name;
  double predictedNorm = 0.0;
  std::vector<double> residuals;  // one per FD step
  double order = std::numeric_limits<double>::quiet_NaN();
};

struct EvolutionReport {
  std::vector<double> steps;
  std::vector<QuantityCheck> quantities;
};

/// Central differences of every tracked quantity along the integrated flow.
/// The order estimate uses the first two steps (expected ratio 2).
/// `adjust` may rewrite the predictions first (used to exercise failure paths).
inline EvolutionReport fdCheck(const FlowState& s, const FlowSpec& spec,
                               const std::vector<double>& steps = {2e-3, 1e-3, 1e-4},
                               const std::function<void(std::vector<Tracked>&)>& adjust = {}) {
  if (spec.jetDepth < 2) throw Error(ErrorCode::InvalidConfig, "flow fields are not exact to second order");
  auto pred = predictedRates(s, spec);
  if (adjust) adjust(pred);
  EvolutionReport rep;
  rep.steps = steps;
  for (const auto& p : pred) rep.quantities.push_back({p.name, maxAbs(p.value), {}, std::numeric_limits<double>::quiet_NaN()});
  for (double dt : steps) {
    const auto plus = trackedValues(analyze(detail::advance(s, spec, dt, StepMethod::Rk4).phi));
    const auto minus = trackedValues(analyze(detail::advance(s, spec, -dt, StepMethod::Rk4).phi));
    for (std::size_t q = 0; q < pred.size(); ++q) {
      const MultiTensor fd = (plus[q].value - minus[q].value) * (0.5 / dt);
      rep.quantities[q].residuals.push_back(maxAbsDiff(fd, pred[q].value));
    }
  }
  if (steps.size() >= 2)
    for (auto& q : rep.quantities) {
      const double ratio = steps[0] / steps[1];
      if (q.residuals[0] > 0.0 && q.residuals[1] > 0.0) q.order = std::log(q.residuals[0] / q.residuals[1]) / std::log(ratio);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Component structure of ∂ₜψ

/// For ∂ₜφ = η₁ + η₇ + η₂₇, residuals of *∂ₜψ against (4/3)η₁, η₇, −η₂₇.
struct PsiRatioResidual {
  double one = 0.0, seven = 0.0, twentySeven = 0.0;
  double worst() const { return std::max({one, seven, twentySeven}); }
};

inline PsiRatioResidual psiComponentRatios(const JetGeometry& G, const FlowFields& ff) {
  const G2Frame& f = G.frame;
  const MultiTensor h = valuePart(ff.h);
  const double tr = traceG(f, h);
  const MultiTensor h1 = f.g * (tr / 7.0);
  const MultiTensor h0 = h - h1;
  const MultiTensor X = valuePart(ff.x);
  const auto rates = predictedRates(G, ff);
  const MultiTensor starDpsi = toTensor(hodgeStar(f, toForm(rates[5].value)));
  const ThreeFormSplit<double> s = decomposeThreeForm(f, starDpsi);
  const MultiTensor s1 = f.g * (traceG(f, s.h) / 7.0);
  const MultiTensor s0 = s.h - s1;
  PsiRatioResidual r;
  r.one = maxAbsDiff(iMapUnchecked(f, s1), iMapUnchecked(f, h1) * (4.0 / 3.0));
  r.seven = maxAbsDiff(vectorIntoPsi(f, s.X), vectorIntoPsi(f, X));
  r.twentySeven = maxAbsDiff(iMapUnchecked(f, s0), iMapUnchecked(f, h0) * -1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Flow by diffeomorphisms

/// A 1-jet lifted to a 2-jet with zero second derivatives.
inline Jet2 liftJet(const Jet1& a) {
  Jet2 r(a.value);
  for (int i = 0; i < kDim; ++i) r.grad[i] = a.grad[i];
  return r;
}

/// (h, X) with L_Yφ = i(h) + X⌟ψ; exact only to first order, so it can feed
/// predictedRates but not step().
inline FlowSpec diffeoFlowSpec(const JetGeometry& G, const BasicTensor<Jet2>& Y) {
  const DiffeoSplit<Jet1> d = diffeoDecompositionJet(G, Y);
  FlowFields ff;
  for (std::size_t i = 0; i < ff.h.size(); ++i) ff.h[i] = liftJet(d.h[i]);
  for (std::size_t i = 0; i < ff.x.size(); ++i) ff.x[i] = liftJet(d.X[i]);
  FlowSpec s;
  s.name = "diffeo";
  s.jetDepth = 1;
  s.fields = [ff](double) { return ff; };
  return s;
}

/// max |predicted ∂ₜT − L_Y T| under the flow generated by Y.
inline double diffeoTorsionResidual(const JetGeometry& G, const BasicTensor<Jet2>& Y) {
  const FlowSpec spec = diffeoFlowSpec(G, Y);
  const FlowInputs in(G, spec.fields(0.0));
  return maxAbsDiff(torsionRate(G, in), lieDerivative(G.TJet, Y));
}

}  // namespace g2flow
