#pragma once

// Differential geometry of a G2-structure from its 2-jet at one point:
// connection, curvature, full torsion and the torsion forms, plus the
// Bianchi-type and curvature-from-torsion relations.

#include <cmath>

#include "g2flow/fields.hpp"
#include "g2flow/g2algebra.hpp"
#include "g2flow/jet_scalar.hpp"

namespace g2flow {

struct StructureJet {
  Point basepoint{};
  BasicTensor<Jet2> phi{"ddd", Symmetry::skew()};
};

/// Evaluate a 3-form field (as a function of coordinate jets) at a point.
template <class Fn>
StructureJet structureJetAt(const Point& x, Fn&& phiOf) {
  StructureJet s;
  s.basepoint = x;
  s.phi = phiOf(coordinateJets(x));
  s.phi.setSymmetry(Symmetry::skew());
  return s;
}

template <class S>
G2FrameT<LowerT<S>> truncateFrame(const G2FrameT<S>& f) {
  return G2FrameT<LowerT<S>>{truncate(f.phi),  truncate(f.B),   truncate(f.g),     truncate(f.gInv),
                             truncate(f.sqrtDetG), truncate(f.psi), truncate(f.cross)};
}

// ---------------------------------------------------------------------------
// Connection

struct ConnectionData {
  MultiTensor gamma{"udd"};      // Γ^k_ij as (k,i,j)
  MultiTensor gammaGrad{"dudd"};  // ∂_m Γ^k_ij as (m,k,i,j)
  BasicTensor<Jet1> gammaJet{"udd"};
};

/// Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij) as a 1-jet.
inline BasicTensor<Jet1> christoffelJet(const BasicTensor<Jet2>& g, const BasicTensor<Jet1>& gInv) {
  std::array<BasicTensor<Jet1>, kDim> dg;
  for (int m = 0; m < kDim; ++m) dg[m] = partial(g, m);
  BasicTensor<Jet1> lowered("ddd");  // Γ_lij
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        const Jet1 v = (dg[i](j, l) + dg[j](i, l) - dg[l](i, j)) * 0.5;
        lowered(l, i, j) = v;
        lowered(l, j, i) = v;
      }
  BasicTensor<Jet1> gam("udd");
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        Jet1 acc(0.0);
        for (int l = 0; l < kDim; ++l) acc += gInv(k, l) * lowered(l, i, j);
        gam(k, i, j) = acc;
        gam(k, j, i) = acc;
      }
  return gam;
}

inline ConnectionData christoffel(const BasicTensor<Jet2>& g) {
  if (!(minEigenvalue(valuePart(g)) > 0.0)) throw Error(ErrorCode::NotPositive, "metric is not positive-definite");
  auto [det, inv] = detAndInverse(toMat(truncate(g)));
  (void)det;
  ConnectionData c;
  c.gammaJet = christoffelJet(g, fromMat(inv, "uu", Symmetry::symmetric()));
  c.gamma = valuePart(c.gammaJet);
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    c.gammaGrad[flat] = c.gammaJet(x[1], x[2], x[3]).grad[x[0]];
  });
  return c;
}

/// ∇_m t for one direction m, given ∂_m t; valid for any scalar type.
template <class S>
BasicTensor<S> nablaAlong(const BasicTensor<S>& gamma, const BasicTensor<S>& t, const BasicTensor<S>& dmt, int m) {
  BasicTensor<S> r = dmt;
  r.setSymmetry(Symmetry::none());
  const int rank = t.rank();
  forEachIndex(rank, [&](const std::array<int, 4>& idx, std::size_t flat) {
    S acc(0.0);
    for (int s = 0; s < rank; ++s) {
      auto src = idx;
      const bool cov = t.variance(s) == Variance::Covariant;
      for (int p = 0; p < kDim; ++p) {
        src[s] = p;
        if (cov)
          acc -= gamma(p, m, idx[s]) * t.at(src);
        else
          acc += gamma(idx[s], m, p) * t.at(src);
      }
    }
    r[flat] += acc;
  });
  return r;
}

/// ∇t with the derivative slot first; t given as a 1-jet of rank ≤ 3.
inline MultiTensor covariantDerivative(const ConnectionData& conn, const BasicTensor<Jet1>& t) {
  if (t.rank() > 3) throw Error(ErrorCode::RankOverflow, "covariant derivative of rank > 3 tensor");
  const MultiTensor tv = valuePart(t);
  MultiTensor out("d" + t.slots());
  const std::size_t block = tv.size();
  for (int m = 0; m < kDim; ++m) {
    const MultiTensor d = nablaAlong(conn.gamma, tv, partial(t, m), m);
    for (std::size_t i = 0; i < block; ++i) out[m * block + i] = d[i];
  }
  return out;
}

/// ∇t as a 1-jet (requires t as a 2-jet and Γ as a 1-jet).
inline BasicTensor<Jet1> covariantDerivativeJet(const BasicTensor<Jet1>& gammaJet, const BasicTensor<Jet2>& t) {
  if (t.rank() > 3) throw Error(ErrorCode::RankOverflow, "covariant derivative of rank > 3 tensor");
  const BasicTensor<Jet1> tv = truncate(t);
  BasicTensor<Jet1> out("d" + t.slots());
  const std::size_t block = tv.size();
  for (int m = 0; m < kDim; ++m) {
    const BasicTensor<Jet1> d = nablaAlong(gammaJet, tv, partial(t, m), m);
    for (std::size_t i = 0; i < block; ++i) out[m * block + i] = d[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature

struct CurvatureData {
  MultiTensor riemann{"dddd"};  // R_ijkl = R^m_ijk g_ml
  MultiTensor ricci{"dd"};      // R_jk = R_ijkl g^il
  double scalar = 0.0;
};

inline CurvatureData curvatureFromConnection(const ConnectionData& c, const MultiTensor& g, const MultiTensor& gInv) {
  MultiTensor rup("uddd");  // R^m_ijk as (m,i,j,k)
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [m, i, j, k] = x;
    double v = c.gammaGrad(i, m, j, k) - c.gammaGrad(j, m, i, k);
    for (int p = 0; p < kDim; ++p) v += c.gamma(m, i, p) * c.gamma(p, j, k) - c.gamma(m, j, p) * c.gamma(p, i, k);
    rup[flat] = v;
  });
  CurvatureData out;
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [i, j, k, l] = x;
    double v = 0.0;
    for (int m = 0; m < kDim; ++m) v += rup(m, i, j, k) * g(m, l);
    out.riemann[flat] = v;
  });
  out.ricci = contract(out.riemann, gInv, {{0, 0}, {3, 1}});
  out.scalar = contract(out.ricci, gInv, {{0, 0}, {1, 1}})[0];
  return out;
}

inline CurvatureData curvature(const BasicTensor<Jet2>& g) {
  const ConnectionData c = christoffel(g);
  const MultiTensor gv = valuePart(g);
  return curvatureFromConnection(c, gv, matInvDetPow(gv).inverse);
}

// ---------------------------------------------------------------------------
// Torsion

/// The four torsion forms read off the full torsion tensor T = S + C.
template <class S>
struct TorsionSplit {
  S tau0{};
  BasicTensor<S> tau1{"d"};                        // 1-form
  BasicTensor<S> tau1Form{"dd", Symmetry::skew()};  // as an Ω²₇ 2-form
  BasicTensor<S> tau2{"dd", Symmetry::skew()};
  BasicTensor<S> tau3{"dd", Symmetry::symmetric()};
};

template <class S>
TorsionSplit<S> splitTorsion(const G2FrameT<S>& f, const BasicTensor<S>& T) {
  BasicTensor<S> sym("dd", Symmetry::symmetric()), skew("dd", Symmetry::skew());
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      sym(i, j) = (T(i, j) + T(j, i)) * 0.5;
      skew(i, j) = (T(i, j) - T(j, i)) * 0.5;
    }
  TorsionSplit<S> r;
  r.tau0 = traceG(f, sym) * (4.0 / 7.0);
  for (std::size_t i = 0; i < sym.size(); ++i) r.tau3[i] = f.g[i] * r.tau0 * 0.25 - sym[i];
  const TwoFormSplit<S> c = projectTwoForm(f, skew);
  r.tau1Form = c.beta7;
  r.tau2 = c.beta14 * -2.0;
  r.tau1 = lower1(f, twoFormToVectorUnchecked(f, c.beta7));
  return r;
}

/// T_lm = (1/24) ∇_l φ_abc ψ_m^{abc}.
template <class S>
BasicTensor<S> torsionFromNablaPhi(const G2FrameT<S>& f, const BasicTensor<S>& nablaPhi) {
  const BasicTensor<S> psiUp = raiseSlot(f, raiseSlot(f, raiseSlot(f, f.psi, 1), 2), 3);
  BasicTensor<S> T = contract(nablaPhi, psiUp, {{1, 1}, {2, 2}, {3, 3}});
  for (std::size_t i = 0; i < T.size(); ++i) T[i] *= 1.0 / 24.0;
  return T;
}

struct TorsionData {
  MultiTensor T{"dd"};
  double tau0 = 0.0;
  MultiTensor tau1{"d"};
  MultiTensor tau1Form{"dd"};
  MultiTensor tau2{"dd"};
  MultiTensor tau3{"dd"};
  MultiTensor TGrad{"ddd"};  // ∇_i T_jl as (i,j,l)

  MultiTensor leeForm() const { return tau1 * -12.0; }
};

/// Everything the 2-jet of φ determines at the base point.
struct JetGeometry {
  StructureJet jet;
  G2FrameT<Jet2> frame2;
  G2FrameT<Jet1> frame1;
  G2Frame frame;
  ConnectionData conn;
  CurvatureData curv;
  BasicTensor<Jet1> nablaPhi{"dddd"};  // ∇_l φ_abc as (l,a,b,c)
  BasicTensor<Jet1> TJet{"dd"};
  TorsionSplit<Jet1> splitJet;
  TorsionData torsion;
};

inline JetGeometry analyze(const StructureJet& s) {
  JetGeometry G;
  G.jet = s;
  G.frame2 = frameFromPhi(s.phi);
  G.frame1 = truncateFrame(G.frame2);
  G.frame = frameValue(G.frame2);
  G.conn.gammaJet = christoffelJet(G.frame2.g, G.frame1.gInv);
  G.conn.gamma = valuePart(G.conn.gammaJet);
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    G.conn.gammaGrad[flat] = G.conn.gammaJet(x[1], x[2], x[3]).grad[x[0]];
  });
  G.curv = curvatureFromConnection(G.conn, G.frame.g, G.frame.gInv);
  G.nablaPhi = covariantDerivativeJet(G.conn.gammaJet, s.phi);
  G.TJet = torsionFromNablaPhi(G.frame1, G.nablaPhi);
  G.splitJet = splitTorsion(G.frame1, G.TJet);
  TorsionData& t = G.torsion;
  t.T = valuePart(G.TJet);
  t.tau0 = G.splitJet.tau0.value;
  t.tau1 = valuePart(G.splitJet.tau1);
  t.tau1Form = valuePart(G.splitJet.tau1Form);
  t.tau2 = valuePart(G.splitJet.tau2);
  t.tau3 = valuePart(G.splitJet.tau3);
  t.TGrad = covariantDerivative(G.conn, G.TJet);
  return G;
}

inline TorsionData fullTorsion(const StructureJet& s) { return analyze(s).torsion; }

/// max |∇_l φ_abc − T_lm g^{mn} ψ_nabc|.
inline double definingRelationResidual(const JetGeometry& G) {
  const MultiTensor psiU = raiseSlot(G.frame, G.frame.psi, 0);
  const MultiTensor rhs = contract(G.torsion.T, psiU, {{1, 0}});
  return maxAbsDiff(valuePart(G.nablaPhi), rhs);
}

/// max over l of |j(∇_l φ)|.
inline double nablaPhiOmega7Residual(const JetGeometry& G) {
  const MultiTensor np = valuePart(G.nablaPhi);
  double worst = 0.0;
  for (int l = 0; l < kDim; ++l) {
    MultiTensor eta("ddd", Symmetry::skew());
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = np[l * eta.size() + i];
    worst = std::max(worst, maxAbs(jMap(G.frame, eta)));
  }
  return worst;
}

/// ∇_l ψ for one direction, computed from the ψ jet.
inline MultiTensor nablaPsiAlong(const JetGeometry& G, int l) {
  return nablaAlong(G.conn.gamma, G.frame.psi, valuePart(partial(G.frame2.psi, l)), l);
}

/// max |∇_m ψ_ijkl − (−T_mi φ_jkl + T_mj φ_ikl − T_mk φ_ijl + T_ml φ_ijk)|.
inline double nablaPsiResidual(const JetGeometry& G) {
  const MultiTensor& T = G.torsion.T;
  const MultiTensor& p = G.frame.phi;
  double worst = 0.0;
  for (int m = 0; m < kDim; ++m) {
    const MultiTensor np = nablaPsiAlong(G, m);
    forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
      const auto [i, j, k, l] = x;
      const double rhs = -T(m, i) * p(j, k, l) + T(m, j) * p(i, k, l) - T(m, k) * p(i, j, l) + T(m, l) * p(i, j, k);
      worst = std::max(worst, std::abs(np[flat] - rhs));
    });
  }
  return worst;
}

/// max |T − (τ₀/4 g − τ₃ + τ₁ − τ₂/2)|.
inline double torsionReconstructionResidual(const G2Frame& f, const TorsionData& t) {
  MultiTensor rec = f.g * (0.25 * t.tau0) - t.tau3 + t.tau1Form - t.tau2 * 0.5;
  return maxAbsDiff(t.T, rec);
}

// ---------------------------------------------------------------------------
// Torsion forms from dφ and dψ

struct ExteriorTorsion {
  FormD dphi{4};
  FormD dpsi{5};
  double tau0 = 0.0;
  MultiTensor tau1{"d"};         // from dφ
  MultiTensor tau1FromPsi{"d"};  // from dψ
  MultiTensor tau2{"dd"};
  MultiTensor tau3{"dd"};  // symmetric traceless tensor with i(τ₃) = *(…)
  FormD tau3Form{3};
  double tau3Omega7Leak = 0.0;     // |Ω³₇ part| of the recovered τ₃ form
  double coderivativeResidual = 0.0;  // |−*dψ − (−g^{lk}∇_l φ_kab)|
};

/// d of a form field from its jet: dα = Σ_m dx^m ∧ ∂_m α.
template <class S>
FormD exteriorDerivative(const BasicTensor<S>& formJet) {
  const int k = formJet.rank();
  FormD out(k + 1);
  for (int m = 0; m < kDim; ++m) {
    MultiTensor d = valuePart(partial(formJet, m));
    d.setSymmetry(Symmetry::skew());
    out += wedge(basisForm(m), toForm(d));
  }
  return out;
}

inline ExteriorTorsion torsionFormsViaExterior(const JetGeometry& G) {
  const G2Frame& f = G.frame;
  ExteriorTorsion r;
  r.dphi = exteriorDerivative(G.jet.phi);
  r.dpsi = exteriorDerivative(G.frame2.psi);
  const FormD pf = toForm(f.phi), sf = toForm(f.psi);
  r.tau0 = formInner(f, r.dphi, sf) / 7.0;
  const FormD t1 = hodgeStar(f, wedge(pf, hodgeStar(f, r.dphi))) * (1.0 / 12.0);
  const FormD t1p = hodgeStar(f, wedge(sf, hodgeStar(f, r.dpsi))) * (1.0 / 12.0);
  for (int i = 0; i < kDim; ++i) {
    r.tau1(i) = t1[i];
    r.tau1FromPsi(i) = t1p[i];
  }
  r.tau3Form = hodgeStar(f, r.dphi - sf * r.tau0 - wedge(t1, pf) * 3.0);
  const ThreeFormSplit<double> s = decomposeThreeForm(f, toTensor(r.tau3Form));
  r.tau3 = s.h;
  r.tau3Omega7Leak = maxAbs(s.X);
  r.tau2 = toTensor(hodgeStar(f, r.dpsi - wedge(t1, sf) * 4.0));

  const MultiTensor delta = toTensor(hodgeStar(f, r.dpsi)) * -1.0;
  const MultiTensor np = valuePart(G.nablaPhi);
  double worst = 0.0;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      double v = 0.0;
      for (int l = 0; l < kDim; ++l)
        for (int k = 0; k < kDim; ++k) v -= f.gInv(l, k) * np(l, k, a, b);
      worst = std::max(worst, std::abs(delta(a, b) - v));
    }
  r.coderivativeResidual = worst;
  return r;
}

/// Worst disagreement between the exterior route and the split of T.
struct TorsionRouteComparison {
  double tau0 = 0.0, tau1 = 0.0, tau1Routes = 0.0, tau2 = 0.0, tau3 = 0.0, tau3Leak = 0.0, coderivative = 0.0;
  double worst() const { return std::max({tau0, tau1, tau1Routes, tau2, tau3, tau3Leak, coderivative}); }
};

inline TorsionRouteComparison compareTorsionRoutes(const JetGeometry& G) {
  const ExteriorTorsion e = torsionFormsViaExterior(G);
  const TorsionData& t = G.torsion;
  TorsionRouteComparison c;
  c.tau0 = std::abs(e.tau0 - t.tau0);
  c.tau1 = maxAbsDiff(e.tau1, t.tau1);
  c.tau1Routes = maxAbsDiff(e.tau1, e.tau1FromPsi);
  c.tau2 = maxAbsDiff(e.tau2, t.tau2);
  c.tau3 = maxAbsDiff(e.tau3, t.tau3);
  c.tau3Leak = e.tau3Omega7Leak;
  c.coderivative = e.coderivativeResidual;
  return c;
}

// ---------------------------------------------------------------------------
// Conformal change φ ↦ f³φ

inline StructureJet conformalScale(const StructureJet& s, const Jet2& f) {
  if (f.value == 0.0) throw Error(ErrorCode::ZeroScale, "conformal factor vanishes at the base point");
  const Jet2 f3 = f * f * f;
  StructureJet r = s;
  for (std::size_t i = 0; i < r.phi.size(); ++i) r.phi[i] = s.phi[i] * f3;
  return r;
}

/// Residuals of τ̃₀ = τ₀/f, τ̃₁ = τ₁ + d log f, τ̃₂ = fτ₂, i(τ̃₃) = f² i(τ₃).
struct ConformalLawResidual {
  double tau0 = 0.0, tau1 = 0.0, tau2 = 0.0, tau3 = 0.0;
  double worst() const { return std::max({tau0, tau1, tau2, tau3}); }
};

inline ConformalLawResidual conformalLawResidual(const StructureJet& s, const Jet2& f) {
  const JetGeometry a = analyze(s);
  const JetGeometry b = analyze(conformalScale(s, f));
  const double fv = f.value;
  ConformalLawResidual r;
  r.tau0 = std::abs(b.torsion.tau0 - a.torsion.tau0 / fv);
  MultiTensor dlog("d");
  for (int i = 0; i < kDim; ++i) dlog(i) = f.grad[i] / fv;
  r.tau1 = maxAbsDiff(b.torsion.tau1, a.torsion.tau1 + dlog);
  r.tau2 = maxAbsDiff(b.torsion.tau2, a.torsion.tau2 * fv);
  r.tau3 = maxAbsDiff(iMapUnchecked(b.frame, b.torsion.tau3), iMapUnchecked(a.frame, a.torsion.tau3) * (fv * fv));
  return r;
}

// ---------------------------------------------------------------------------
// Bianchi-type identities and curvature from torsion

/// φ with its first two slots raised: g^{am} g^{bn} φ_mnl as (a,b,l).
inline MultiTensor phiRaised2(const G2Frame& f) { return raiseSlot(f, raiseSlot(f, f.phi, 0), 1); }

struct BianchiResidual {
  MultiTensor full{"ddd"};
  MultiTensor contracted{"d"};
  double worst() const { return std::max(maxAbs(full), maxAbs(contracted)); }
};

inline BianchiResidual bianchiResidual(const JetGeometry& G) {
  const G2Frame& f = G.frame;
  const MultiTensor& T = G.torsion.T;
  const MultiTensor& dT = G.torsion.TGrad;
  const MultiTensor& R = G.curv.riemann;
  const MultiTensor pu = phiRaised2(f);
  BianchiResidual out;
  forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [i, j, l, u] = x;
    double tt = 0.0, rr = 0.0;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        tt += T(i, a) * T(j, b) * pu(a, b, l);
        rr += R(i, j, a, b) * pu(a, b, l);
      }
    out.full[flat] = dT(i, j, l) - dT(j, i, l) - tt - 0.5 * rr;
  });
  const MultiTensor t1up = raise1(f, G.torsion.tau1);
  for (int i = 0; i < kDim; ++i) {
    double lhs = 1.75 * G.splitJet.tau0.grad[i];
    for (int j = 0; j < kDim; ++j)
      for (int l = 0; l < kDim; ++l) lhs -= f.gInv(j, l) * dT(j, i, l);
    double rhs = 0.0;
    for (int a = 0; a < kDim; ++a) rhs -= 6.0 * T(i, a) * t1up(a);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int j = 0; j < kDim; ++j)
          for (int l = 0; l < kDim; ++l) rhs -= 0.5 * R(a, b, j, i) * pu(a, b, l) * f.gInv(j, l);
    out.contracted(i) = lhs - rhs;
  }
  return out;
}

/// R_jk = (∇_iT_jm − ∇_jT_im) φ_nkl g^{mn} g^{il} − T_jl g^{li} T_ik + Tr T · T_jk
///        − T_jb T_ia g^{il} g^{ap} ψ_lpqk g^{bq}.
inline MultiTensor ricciFromTorsion(const G2Frame& f, const MultiTensor& T, const MultiTensor& dT) {
  const MultiTensor pu = raiseSlot(f, raiseSlot(f, f.phi, 0), 2);  // φ^n_k^l as (n,k,l)
  const MultiTensor Tu = raiseSlot(f, raiseSlot(f, T, 0), 1);        // T^{ia}
  const MultiTensor TT = matMulG(f, T, T);
  double trT = traceG(f, T);
  MultiTensor R("dd");
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) {
      double v = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int m = 0; m < kDim; ++m) {
          // g^{mn} g^{il} φ_nkl = φ^m_k^i
          v += (dT(i, j, m) - dT(j, i, m)) * pu(m, k, i);
        }
      v += -TT(j, k) + trT * T(j, k);
      for (int b = 0; b < kDim; ++b)
        for (int q = 0; q < kDim; ++q) {
          double s = 0.0;
          for (int l = 0; l < kDim; ++l)
            for (int p = 0; p < kDim; ++p) s += Tu(l, p) * f.psi(l, p, q, k);
          v -= T(j, b) * f.gInv(b, q) * s;
        }
      R(j, k) = v;
    }
  return R;
}

struct CurvatureFromTorsion {
  MultiTensor ricci{"dd"};            // algebraic form in ∇T and T
  MultiTensor ricciDivergence{"dd"};  // divergence form, differentiating the contracted tensors
  double scalar = 0.0;                // closed form in the torsion forms
  MultiTensor pi7Riem{"dddd"};
  MultiTensor pi14Riem{"dddd"};
  MultiTensor qTrace{"dd"};
  MultiTensor ricciFromPi7{"dd"};
  MultiTensor ricciFromPi14{"dd"};
  MultiTensor pi7BianchiResidual{"ddd"};
};

inline CurvatureFromTorsion curvatureFromTorsion(const JetGeometry& G) {
  const G2Frame& f = G.frame;
  const G2FrameT<Jet1>& f1 = G.frame1;
  const TorsionData& t = G.torsion;
  const MultiTensor& R = G.curv.riemann;
  CurvatureFromTorsion out;
  out.ricci = ricciFromTorsion(f, t.T, t.TGrad);

  // Divergence form: W_jk^i = T_jm φ^m_k^i and Z_k = T_im φ^m_k^i.
  const BasicTensor<Jet1> pu1 = raiseSlot(f1, raiseSlot(f1, f1.phi, 0), 2);
  BasicTensor<Jet1> W("ddu"), Z("d");
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k)
      for (int i = 0; i < kDim; ++i) {
        Jet1 acc(0.0);
        for (int m = 0; m < kDim; ++m) acc += G.TJet(j, m) * pu1(m, k, i);
        W(j, k, i) = acc;
      }
  for (int k = 0; k < kDim; ++k) {
    Jet1 acc(0.0);
    for (int i = 0; i < kDim; ++i)
      for (int m = 0; m < kDim; ++m) acc += G.TJet(i, m) * pu1(m, k, i);
    Z(k) = acc;
  }
  const MultiTensor dW = covariantDerivative(G.conn, W);  // (p, j, k, i)
  const MultiTensor dZ = covariantDerivative(G.conn, Z);  // (j, k)
  const MultiTensor psiU = raiseSlot(f, raiseSlot(f, f.psi, 0), 1);
  const MultiTensor Tu = raiseSlot(f, raiseSlot(f, t.T, 0), 1);
  const MultiTensor TT = matMulG(f, t.T, t.T);
  const double trT = traceG(f, t.T);
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) {
      double v = -dZ(j, k) - TT(j, k) + trT * t.T(j, k);
      for (int i = 0; i < kDim; ++i) v += dW(i, j, k, i);
      for (int b = 0; b < kDim; ++b)
        for (int q = 0; q < kDim; ++q) {
          double s = 0.0;
          for (int l = 0; l < kDim; ++l)
            for (int p = 0; p < kDim; ++p) s += Tu(l, p) * f.psi(l, p, q, k);
          v += t.T(j, b) * f.gInv(b, q) * s;
        }
      out.ricciDivergence(j, k) = v;
    }

  // Scalar curvature in terms of the torsion forms (matrix norms).
  const MultiTensor dTau1 = covariantDerivative(G.conn, G.splitJet.tau1);  // (i, l)
  double div = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int l = 0; l < kDim; ++l) div += f.gInv(i, l) * dTau1(i, l);
  out.scalar = -12.0 * div + 21.0 / 8.0 * t.tau0 * t.tau0 - matInner(f, t.tau3, t.tau3) +
               5.0 * matInner(f, t.tau1Form, t.tau1Form) - 0.25 * matInner(f, t.tau2, t.tau2);

  // Riemann split along its last two slots.
  const MultiTensor psiUp2 = psiU;  // ψ^{pq}_{kl}
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [i, j, k, l] = x;
    double q = 0.0;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) q += R(i, j, a, b) * psiUp2(a, b, k, l);
    out.pi7Riem[flat] = R[flat] / 3.0 - q / 6.0;
    out.pi14Riem[flat] = 2.0 * R[flat] / 3.0 + q / 6.0;
  });
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) {
      double qt = 0.0, r7 = 0.0, r14 = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int l = 0; l < kDim; ++l) {
          double q = 0.0;
          for (int a = 0; a < kDim; ++a)
            for (int b = 0; b < kDim; ++b) q += R(i, j, a, b) * psiUp2(a, b, k, l);
          qt += q * f.gInv(i, l);
          r7 += out.pi7Riem(i, j, k, l) * f.gInv(i, l);
          r14 += out.pi14Riem(i, j, k, l) * f.gInv(i, l);
        }
      out.qTrace(j, k) = qt;
      out.ricciFromPi7(j, k) = 3.0 * r7;
      out.ricciFromPi14(j, k) = 1.5 * r14;
    }

  // 3 (π₇Riem)^m_ij g_ml = ∇_iT_jl − ∇_jT_il − T_ia T_jb φ^{ab}_l
  const MultiTensor pab = phiRaised2(f);
  forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
    const auto [i, j, l, u] = x;
    double lhs = 0.0, tt = 0.0;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        lhs += R(i, j, a, b) * pab(a, b, l);
        tt += t.T(i, a) * t.T(j, b) * pab(a, b, l);
      }
    out.pi7BianchiResidual[flat] = 0.5 * lhs - (t.TGrad(i, j, l) - t.TGrad(j, i, l) - tt);
  });
  return out;
}

/// Ricci of a structure whose only torsion is a constant τ₀: T = (τ₀/4) g, ∇T = 0.
inline MultiTensor nearlyG2Ricci(const G2Frame& f, double tau0) {
  return ricciFromTorsion(f, f.g * (0.25 * tau0), MultiTensor("ddd"));
}

// ---------------------------------------------------------------------------
// Lie derivative of φ along Y: L_Y φ = i(h) + X⌟ψ

template <class S>
struct DiffeoSplit {
  BasicTensor<S> h{"dd", Symmetry::symmetric()};
  BasicTensor<S> X{"u"};
};

/// h_ij = ½(∇_iY_j + ∇_jY_i), X^k = Y^l T_lm g^{mk} − ½ (∇_aY_b) g^{ai} g^{bj} φ_ijm g^{mk},
/// as 1-jets (Y is a vector 2-jet).
inline DiffeoSplit<Jet1> diffeoDecompositionJet(const JetGeometry& G, const BasicTensor<Jet2>& Y) {
  // Y_j as a 2-jet, then ∇Y as a 1-jet.
  BasicTensor<Jet2> Yl("d");
  for (int j = 0; j < kDim; ++j) {
    Jet2 acc(0.0);
    for (int k = 0; k < kDim; ++k) acc += G.frame2.g(j, k) * Y(k);
    Yl(j) = acc;
  }
  const BasicTensor<Jet1> dY = covariantDerivativeJet(G.conn.gammaJet, Yl);  // (a, b)
  const G2FrameT<Jet1>& f = G.frame1;
  DiffeoSplit<Jet1> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out.h(i, j) = (dY(i, j) + dY(j, i)) * 0.5;
  const BasicTensor<Jet1> Yv = truncate(Y);
  const BasicTensor<Jet1> dYup = raiseSlot(f, raiseSlot(f, dY, 0), 1);
  BasicTensor<Jet1> xl("d");
  for (int m = 0; m < kDim; ++m) {
    Jet1 acc(0.0);
    for (int l = 0; l < kDim; ++l) acc += Yv(l) * G.TJet(l, m);
    Jet1 rot(0.0);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) rot += dYup(a, b) * f.phi(a, b, m);
    xl(m) = acc - rot * 0.5;
  }
  out.X = raise1(f, xl);
  return out;
}

inline DiffeoSplit<double> diffeoDecomposition(const JetGeometry& G, const BasicTensor<Jet2>& Y) {
  const DiffeoSplit<Jet1> j = diffeoDecompositionJet(G, Y);
  DiffeoSplit<double> r;
  r.h = valuePart(j.h);
  r.X = valuePart(j.X);
  return r;
}

/// (L_Y α)_{i…} = Y^l ∂_l α_{i…} + Σ_s (∂_{i_s} Y^l) α_{…l…} in coordinates, for covariant α.
template <class S>
MultiTensor lieDerivative(const BasicTensor<S>& alpha, const BasicTensor<Jet2>& Y) {
  const MultiTensor a = valuePart(alpha);
  MultiTensor out(a.slots());
  const int rank = a.rank();
  forEachIndex(rank, [&](const std::array<int, 4>& idx, std::size_t flat) {
    double v = 0.0;
    for (int l = 0; l < kDim; ++l) {
      v += Y(l).value * valueOf(partial(alpha, l)[flat]);
      for (int s = 0; s < rank; ++s) {
        auto src = idx;
        src[s] = l;
        v += Y(l).grad[idx[s]] * a.at(src);
      }
    }
    out[flat] = v;
  });
  return out;
}

/// max |L_Y φ − (i(h) + X⌟ψ)| at the base point.
inline double diffeoDecompositionResidual(const JetGeometry& G, const BasicTensor<Jet2>& Y) {
  const DiffeoSplit<double> d = diffeoDecomposition(G, Y);
  const MultiTensor lie = lieDerivative(G.jet.phi, Y);
  return maxAbsDiff(lie, iMapUnchecked(G.frame, d.h) + vectorIntoPsi(G.frame, d.X));
}

}  // namespace g2flow
