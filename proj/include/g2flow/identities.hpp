#pragma once

// Catalog of pointwise G2 identities, each evaluated as a worst-case residual
// over random vectors and forms at a fixed frame.

#include <functional>
#include <string>
#include <vector>

#include "g2flow/g2algebra.hpp"
#include "g2flow/random.hpp"

namespace g2flow {

struct IdentityResidual {
  std::string name;
  double maxResidual;
  int samples;
};

namespace ident {

using Vec = MultiTensor;  // rank-1, contravariant unless stated

inline double dot(const G2Frame& f, const Vec& u, const Vec& v) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) s += f.g(i, j) * u(i) * v(j);
  return s;
}
inline double phiOf(const G2Frame& f, const Vec& a, const Vec& b, const Vec& c) {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) s += f.phi(i, j, k) * a(i) * b(j) * c(k);
  return s;
}
inline double psiOf(const G2Frame& f, const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  double s = 0.0;
  forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
    s += f.psi[flat] * a(x[0]) * b(x[1]) * c(x[2]) * d(x[3]);
  });
  return s;
}
inline Vec crossOf(const G2Frame& f, const Vec& u, const Vec& v) {
  Vec r("u");
  for (int l = 0; l < kDim; ++l) {
    double s = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) s += f.cross(l, i, j) * u(i) * v(j);
    r(l) = s;
  }
  return r;
}
inline FormD flat(const G2Frame& f, const Vec& v) { return oneForm<double>(lower1(f, v)); }
inline FormD asForm1(const Vec& lower) { return oneForm<double>(lower); }
inline FormD phiForm(const G2Frame& f) { return toForm(f.phi); }
inline FormD psiForm(const G2Frame& f) { return toForm(f.psi); }
inline double topCoeff(const FormD& top) { return top[0]; }
inline Vec lowerVec(const G2Frame& f, const Vec& v) { return lower1(f, v); }
inline Vec raiseVec(const G2Frame& f, const Vec& v) { return raise1(f, v); }
inline double maxDiff(const FormD& a, const FormD& b) { return maxAbs(a - b); }

/// Lowered vector of u⌟v⌟w⌟ψ = ψ(w, v, u, ·).
inline Vec uvwPsi(const G2Frame& f, const Vec& u, const Vec& v, const Vec& w) {
  Vec r("d");
  for (int m = 0; m < kDim; ++m) {
    double s = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) s += f.psi(i, j, k, m) * w(i) * v(j) * u(k);
    r(m) = s;
  }
  return r;
}

inline MultiTensor outerSkew(const Vec& a, const Vec& b) {
  MultiTensor r("dd");
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) r(i, j) = a(i) * b(j) - a(j) * b(i);
  return r;
}

}  // namespace ident

/// Every identity of the catalog with its worst residual over `samples`
/// random inputs. Sample k of identity n uses counter stream n, so results do
/// not depend on evaluation order.
inline std::vector<IdentityResidual> identitySuite(const G2Frame& f, int samples, std::uint64_t seed) {
  using namespace ident;
  std::vector<IdentityResidual> out;
  std::uint64_t stream = 0;
  const FormD pf = phiForm(f), sf = psiForm(f);
  const double vol = f.sqrtDetG;

  auto run = [&](const std::string& name, int n, const std::function<double(CounterRng&)>& residual) {
    CounterRng rng(seed, stream++);
    double worst = 0.0;
    for (int s = 0; s < n; ++s) worst = std::max(worst, residual(rng));
    out.push_back({name, worst, n});
  };
  auto fixedCheck = [&](const std::string& name, const std::function<double()>& residual) {
    ++stream;
    out.push_back({name, residual(), 1});
  };

  // ---- contractions of φ with itself
  fixedCheck("contraction.PP=-6g", [&] {
    double m = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        double s = 0.0;
        for (int k = 0; k < kDim; ++k)
          for (int l = 0; l < kDim; ++l) s += f.cross(k, i, l) * f.cross(l, j, k);
        m = std::max(m, std::abs(s + 6.0 * f.g(i, j)));
      }
    return m;
  });
  fixedCheck("contraction.phiphi.full=42", [&] {
    return std::abs(contract(f.phi, f.phi, {{0, 0}, {1, 1}, {2, 2}}, &f.gInv)[0] - 42.0);
  });
  fixedCheck("contraction.phiphi.two=6g", [&] {
    return maxAbsDiff(contract(f.phi, f.phi, {{1, 1}, {2, 2}}, &f.gInv), f.g * 6.0);
  });
  fixedCheck("contraction.phiphi.one", [&] {
    const MultiTensor lhs = contract(f.phi, f.phi, {{2, 2}}, &f.gInv);  // (i,j,a,b)
    double m = 0.0;
    forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
      const auto [i, j, a, b] = x;
      const double rhs = f.g(i, a) * f.g(j, b) - f.g(i, b) * f.g(j, a) - f.psi(i, j, a, b);
      m = std::max(m, std::abs(lhs[flat] - rhs));
    });
    return m;
  });

  // ---- contractions of φ with ψ
  fixedCheck("contraction.phipsi.three=0", [&] {
    return maxAbs(contract(f.phi, f.psi, {{0, 1}, {1, 2}, {2, 3}}, &f.gInv));
  });
  fixedCheck("contraction.phipsi.two=-4phi", [&] {
    const MultiTensor lhs = contract(f.phi, f.psi, {{1, 2}, {2, 3}}, &f.gInv);  // (i,a,b)
    return maxAbsDiff(lhs, f.phi * -4.0);
  });
  fixedCheck("contraction.phipsi.one", [&] {
    // φ_ijk ψ_abcd g^{kd}: raise the last slot of φ, then loop
    const MultiTensor pu = raiseSlot(f, f.phi, 2);
    double m = 0.0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t) {
          const auto [a, b, c, unused] = x;
          double s = 0.0;
          for (int d = 0; d < kDim; ++d) s += pu(i, j, d) * f.psi(a, b, c, d);
          const double rhs = f.g(i, a) * f.phi(j, b, c) + f.g(i, b) * f.phi(a, j, c) +
                             f.g(i, c) * f.phi(a, b, j) - f.g(a, j) * f.phi(i, b, c) -
                             f.g(b, j) * f.phi(a, i, c) - f.g(c, j) * f.phi(a, b, i);
          m = std::max(m, std::abs(s - rhs));
        });
    return m;
  });

  // ---- contractions of ψ with itself
  fixedCheck("contraction.psipsi.full=168", [&] {
    return std::abs(contract(f.psi, f.psi, {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, &f.gInv)[0] - 168.0);
  });
  fixedCheck("contraction.psipsi.three=24g", [&] {
    return maxAbsDiff(contract(f.psi, f.psi, {{1, 1}, {2, 2}, {3, 3}}, &f.gInv), f.g * 24.0);
  });
  fixedCheck("contraction.psipsi.two", [&] {
    const MultiTensor lhs = contract(f.psi, f.psi, {{2, 2}, {3, 3}}, &f.gInv);
    double m = 0.0;
    forEachIndex(4, [&](const std::array<int, 4>& x, std::size_t flat) {
      const auto [i, j, a, b] = x;
      const double rhs = 4.0 * f.g(i, a) * f.g(j, b) - 4.0 * f.g(i, b) * f.g(j, a) - 2.0 * f.psi(i, j, a, b);
      m = std::max(m, std::abs(lhs[flat] - rhs));
    });
    return m;
  });
  fixedCheck("contraction.psipsi.one", [&] {
    const MultiTensor pu = raiseSlot(f, f.psi, 3);
    const auto& g = f.g;
    const auto& p = f.phi;
    const auto& q = f.psi;
    double m = 0.0;
    forEachIndex(3, [&](const std::array<int, 4>& y, std::size_t) {
      const auto [i, j, k, u0] = y;
      forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t) {
        const auto [a, b, c, u1] = x;
        double s = 0.0;
        for (int d = 0; d < kDim; ++d) s += pu(i, j, k, d) * q(a, b, c, d);
        const double rhs = -p(a, j, k) * p(i, b, c) - p(i, a, k) * p(j, b, c) - p(i, j, a) * p(k, b, c) +
                           g(i, a) * g(j, b) * g(k, c) + g(i, b) * g(j, c) * g(k, a) +
                           g(i, c) * g(j, a) * g(k, b) - g(i, a) * g(j, c) * g(k, b) -
                           g(i, b) * g(j, a) * g(k, c) - g(i, c) * g(j, b) * g(k, a) -
                           g(i, a) * q(j, k, b, c) - g(j, a) * q(k, i, b, c) - g(k, a) * q(i, j, b, c) +
                           g(a, b) * q(i, j, k, c) - g(a, c) * q(i, j, k, b);
        m = std::max(m, std::abs(s - rhs));
      });
    });
    return m;
  });

  // ---- cross product
  run("cross.g(uxv,w)=phi(u,v,w)", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r), w = randomVector(r);
    return std::abs(dot(f, crossOf(f, u, v), w) - phiOf(f, u, v, w));
  });
  run("cross.flat=v_u_phi=*(u^v^psi)", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r);
    const FormD c = flat(f, crossOf(f, u, v));
    const FormD vup = interior(v, interior(u, pf));
    const FormD star = hodgeStar(f, wedge(wedge(flat(f, u), flat(f, v)), sf));
    return std::max(maxDiff(c, vup), maxDiff(c, star));
  });
  run("cross.iterated", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r), w = randomVector(r);
    const Vec lhs = crossOf(f, u, crossOf(f, v, w));
    const Vec t = raiseVec(f, uvwPsi(f, u, v, w));
    double m = 0.0;
    for (int i = 0; i < kDim; ++i)
      m = std::max(m, std::abs(lhs(i) - (-dot(f, u, v) * w(i) + dot(f, u, w) * v(i) - t(i))));
    return m;
  });
  run("cross.g(axb,cxd)", samples, [&](CounterRng& r) {
    const Vec a = randomVector(r), b = randomVector(r), c = randomVector(r), d = randomVector(r);
    const double lhs = dot(f, crossOf(f, a, b), crossOf(f, c, d));
    const double gab = dot(f, a, c) * dot(f, b, d) - dot(f, a, d) * dot(f, b, c);
    return std::abs(lhs - (gab - psiOf(f, a, b, c, d)));
  });

  // ---- norms and wedge relations with a 1-form α and vector w
  fixedCheck("relations.|phi|^2=7", [&] { return std::abs(formInner(f, pf, pf) - 7.0); });
  fixedCheck("relations.|psi|^2=7", [&] { return std::abs(formInner(f, sf, sf) - 7.0); });
  run("relations.|phi^a|^2=4|a|^2", samples, [&](CounterRng& r) {
    const FormD a = randomForm(r, 1);
    const FormD pa = wedge(pf, a);
    return std::abs(formInner(f, pa, pa) - 4.0 * formInner(f, a, a));
  });
  run("relations.|psi^a|^2=3|a|^2", samples, [&](CounterRng& r) {
    const FormD a = randomForm(r, 1);
    const FormD pa = wedge(sf, a);
    return std::abs(formInner(f, pa, pa) - 3.0 * formInner(f, a, a));
  });
  run("relations.*(phi^*(phi^a))=-4a", samples, [&](CounterRng& r) {
    const FormD a = randomForm(r, 1);
    return maxDiff(hodgeStar(f, wedge(pf, hodgeStar(f, wedge(pf, a)))), a * -4.0);
  });
  run("relations.*(psi^*(psi^a))=3a", samples, [&](CounterRng& r) {
    const FormD a = randomForm(r, 1);
    return maxDiff(hodgeStar(f, wedge(sf, hodgeStar(f, wedge(sf, a)))), a * 3.0);
  });
  run("relations.psi^*(phi^a)=0", samples, [&](CounterRng& r) {
    const FormD a = randomForm(r, 1);
    return maxAbs(wedge(sf, hodgeStar(f, wedge(pf, a))));
  });
  run("relations.phi^*(psi^a)=-2psi^a", samples, [&](CounterRng& r) {
    const FormD a = randomForm(r, 1);
    return maxDiff(wedge(pf, hodgeStar(f, wedge(sf, a))), wedge(sf, a) * -2.0);
  });
  run("relations.*(phi^w)=w_psi", samples, [&](CounterRng& r) {
    const Vec w = randomVector(r);
    return maxDiff(hodgeStar(f, wedge(pf, flat(f, w))), interior(w, sf));
  });
  run("relations.*(psi^w)=w_phi", samples, [&](CounterRng& r) {
    const Vec w = randomVector(r);
    return maxDiff(hodgeStar(f, wedge(sf, flat(f, w))), interior(w, pf));
  });
  run("relations.phi^(w_phi)=-2*(w_phi)", samples, [&](CounterRng& r) {
    const Vec w = randomVector(r);
    const FormD wp = interior(w, pf);
    return maxDiff(wedge(pf, wp), hodgeStar(f, wp) * -2.0);
  });
  run("relations.psi^(w_phi)=3*w", samples, [&](CounterRng& r) {
    const Vec w = randomVector(r);
    return maxDiff(wedge(sf, interior(w, pf)), hodgeStar(f, flat(f, w)) * 3.0);
  });
  run("relations.phi^(w_psi)=-4*w", samples, [&](CounterRng& r) {
    const Vec w = randomVector(r);
    return maxDiff(wedge(pf, interior(w, sf)), hodgeStar(f, flat(f, w)) * -4.0);
  });
  run("relations.psi^(w_psi)=0", samples, [&](CounterRng& r) {
    const Vec w = randomVector(r);
    return maxAbs(wedge(sf, interior(w, sf)));
  });

  // ---- cubic identities in u⌟φ
  run("cubic.(u_phi)^(v_phi)^phi=-6g(u,v)vol", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r);
    return std::abs(topCoeff(wedge(wedge(interior(u, pf), interior(v, pf)), pf)) + 6.0 * dot(f, u, v) * vol);
  });
  run("cubic.*(u_phi^v_phi^w_phi)", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r), w = randomVector(r);
    const FormD lhs = hodgeStar(f, wedge(wedge(interior(u, pf), interior(v, pf)), interior(w, pf)));
    const FormD rhs = flat(f, w) * (-2.0 * dot(f, u, v)) + flat(f, v) * (-2.0 * dot(f, u, w)) +
                      flat(f, u) * (-2.0 * dot(f, v, w));
    return maxDiff(lhs, rhs);
  });
  run("cubic.permsum(phi,phi,phi,alpha)", samples, [&](CounterRng& r) {
    const MultiTensor al = randomVector(r, "d");
    const int i = r.index(7), j = r.index(7), l = r.index(7);
    const double s = signedPermSum({{&f.phi, {fixedSlot(i), permSlot(0), permSlot(1)}},
                                    {&f.phi, {fixedSlot(j), permSlot(2), permSlot(3)}},
                                    {&f.phi, {fixedSlot(l), permSlot(4), permSlot(5)}},
                                    {&al, {permSlot(6)}}});
    const double viaG = -16.0 * (f.g(i, j) * al(l) + f.g(i, l) * al(j) + f.g(j, l) * al(i)) * vol;
    const double viaB = (8.0 / 3.0) * (f.B(i, j) * al(l) + f.B(i, l) * al(j) + f.B(j, l) * al(i));
    return std::max(std::abs(s - viaG), std::abs(s - viaB));
  });
  run("cubic.*((v_w_phi)^(u_phi)^phi)", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r), w = randomVector(r);
    const FormD lhs = hodgeStar(f, wedge(wedge(interior(v, interior(w, pf)), interior(u, pf)), pf));
    const FormD rhs = flat(f, w) * (2.0 * dot(f, u, v)) - flat(f, v) * (2.0 * dot(f, u, w)) +
                      asForm1(uvwPsi(f, u, v, w)) * 2.0;
    return maxDiff(lhs, rhs);
  });
  run("cubic.permsum(alpha,phi_il,phi,phi)", samples, [&](CounterRng& r) {
    const MultiTensor al = randomVector(r, "d");
    const int i = r.index(7), j = r.index(7), l = r.index(7);
    const double s = signedPermSum({{&al, {permSlot(0)}},
                                    {&f.phi, {fixedSlot(i), fixedSlot(l), permSlot(1)}},
                                    {&f.phi, {fixedSlot(j), permSlot(2), permSlot(3)}},
                                    {&f.phi, {permSlot(4), permSlot(5), permSlot(6)}}});
    double pa = 0.0;
    for (int k = 0; k < kDim; ++k)
      for (int m = 0; m < kDim; ++m) pa += f.psi(i, l, j, m) * f.gInv(k, m) * al(k);
    const double viaG = 24.0 * (f.g(l, j) * al(i) - f.g(j, i) * al(l) + pa) * vol;
    const double viaB = -4.0 * (f.B(l, j) * al(i) - f.B(j, i) * al(l)) + 24.0 * pa * vol;
    return std::max(std::abs(s - viaG), std::abs(s - viaB));
  });

  // ---- vanishing 7-forms
  run("vanishing.(v_psi)^(w_phi)^(u_phi)=0", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r), w = randomVector(r);
    return std::abs(topCoeff(wedge(wedge(interior(v, sf), interior(w, pf)), interior(u, pf))));
  });
  run("vanishing.(u_v_psi)^(w_phi)^phi", samples, [&](CounterRng& r) {
    const Vec u = randomVector(r), v = randomVector(r), w = randomVector(r);
    const double lhs = topCoeff(wedge(wedge(interior(u, interior(v, sf)), interior(w, pf)), pf));
    const double rhs = topCoeff(wedge(wedge(interior(v, sf), interior(u, interior(w, pf))), pf));
    return std::abs(lhs - rhs);
  });
  run("vanishing.permsum(psi_li,phi_j,phi)skew", samples, [&](CounterRng& r) {
    const int i = r.index(7), j = r.index(7), l = r.index(7);
    auto sum = [&](int a, int b) {
      return signedPermSum({{&f.psi, {fixedSlot(l), fixedSlot(a), permSlot(0), permSlot(1)}},
                            {&f.phi, {fixedSlot(b), permSlot(2), permSlot(3)}},
                            {&f.phi, {permSlot(4), permSlot(5), permSlot(6)}}});
    };
    return std::abs(sum(i, j) + sum(j, i));
  });
  run("vanishing.permsum(phi_i,phi_j,psi_l)=0", samples, [&](CounterRng& r) {
    const int i = r.index(7), j = r.index(7), l = r.index(7);
    return std::abs(signedPermSum({{&f.phi, {fixedSlot(i), permSlot(0), permSlot(1)}},
                                   {&f.phi, {fixedSlot(j), permSlot(2), permSlot(3)}},
                                   {&f.psi, {fixedSlot(l), permSlot(4), permSlot(5), permSlot(6)}}}));
  });

  // ---- top forms
  run("topforms.a^b^c^psi=phi(a,b,c)vol", samples, [&](CounterRng& r) {
    const Vec a = randomVector(r), b = randomVector(r), c = randomVector(r);
    const double lhs = topCoeff(wedge(wedge(wedge(flat(f, a), flat(f, b)), flat(f, c)), sf));
    return std::abs(lhs - phiOf(f, a, b, c) * vol);
  });
  run("topforms.a^b^c^d^phi=psi(a,b,c,d)vol", samples, [&](CounterRng& r) {
    const Vec a = randomVector(r), b = randomVector(r), c = randomVector(r), d = randomVector(r);
    const double lhs = topCoeff(wedge(wedge(wedge(wedge(flat(f, a), flat(f, b)), flat(f, c)), flat(f, d)), pf));
    return std::abs(lhs - psiOf(f, a, b, c, d) * vol);
  });
  run("topforms.a^b^c^w^(v_psi)", samples, [&](CounterRng& r) {
    const Vec a = randomVector(r), b = randomVector(r), c = randomVector(r), w = randomVector(r),
              v = randomVector(r);
    const double lhs =
        topCoeff(wedge(wedge(wedge(wedge(flat(f, a), flat(f, b)), flat(f, c)), flat(f, w)), interior(v, sf)));
    const double rhs = dot(f, v, w) * phiOf(f, a, b, c) - dot(f, a, v) * phiOf(f, w, b, c) -
                       dot(f, b, v) * phiOf(f, a, w, c) - dot(f, c, v) * phiOf(f, a, b, w);
    return std::abs(lhs - rhs * vol);
  });
  run("topforms.a^b^c^d^w^(v_phi)", samples, [&](CounterRng& r) {
    const Vec a = randomVector(r), b = randomVector(r), c = randomVector(r), d = randomVector(r),
              w = randomVector(r), v = randomVector(r);
    const FormD four = wedge(wedge(wedge(flat(f, a), flat(f, b)), flat(f, c)), flat(f, d));
    const double lhs = topCoeff(wedge(wedge(four, flat(f, w)), interior(v, pf)));
    const double rhs = dot(f, v, w) * psiOf(f, a, b, c, d) - dot(f, a, v) * psiOf(f, w, b, c, d) -
                       dot(f, b, v) * psiOf(f, a, w, c, d) - dot(f, c, v) * psiOf(f, a, b, w, d) -
                       dot(f, d, v) * psiOf(f, a, b, c, w);
    return std::abs(lhs - rhs * vol);
  });
  run("topforms.a^b^(c_phi)^(d_psi)", samples, [&](CounterRng& r) {
    const Vec a = randomVector(r), b = randomVector(r), c = randomVector(r), d = randomVector(r);
    const double lhs =
        topCoeff(wedge(wedge(wedge(flat(f, a), flat(f, b)), interior(c, pf)), interior(d, sf)));
    const double gab = dot(f, a, c) * dot(f, b, d) - dot(f, a, d) * dot(f, b, c);
    return std::abs(lhs - (2.0 * gab + psiOf(f, a, b, c, d)) * vol);
  });

  // ---- 2-form identities and brackets
  auto vecOf = [&](const MultiTensor& beta7) { return lower1(f, twoFormToVectorUnchecked(f, beta7)); };
  auto betaPhi = [&](const MultiTensor& beta) {
    // (β_ab g^{bl} φ_lpq) as (a,p,q)
    const MultiTensor bu = raiseSlot(f, beta, 1);
    MultiTensor r("ddd");
    forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
      double s = 0.0;
      for (int l = 0; l < kDim; ++l) s += bu(x[0], l) * f.phi(l, x[1], x[2]);
      r[flat] = s;
    });
    return r;
  };
  run("twoforms.omega14.identity", samples, [&](CounterRng& r) {
    const MultiTensor b = pi14(f, randomTwoForm(r));
    const MultiTensor bp = betaPhi(b);  // (a,p,q); note β_pl g^{lm} φ_maq = bp(p,a,q)
    double m = 0.0;
    forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
      const auto [a, p, q, u0] = x;
      m = std::max(m, std::abs(bp[flat] - (bp(p, a, q) - bp(q, a, p))));
    });
    return m;
  });
  run("twoforms.omega7.identity", samples, [&](CounterRng& r) {
    const MultiTensor b = pi7(f, randomTwoForm(r));
    const MultiTensor bp = betaPhi(b);
    const MultiTensor bv = vecOf(b);
    double m = 0.0;
    forEachIndex(3, [&](const std::array<int, 4>& x, std::size_t flat) {
      const auto [a, p, q, u0] = x;
      const double rhs = -0.5 * bp(p, a, q) + 0.5 * bp(q, a, p) - 1.5 * f.g(p, a) * bv(q) + 1.5 * f.g(q, a) * bv(p);
      m = std::max(m, std::abs(bp[flat] - rhs));
    });
    return m;
  });
  run("twoforms.omega14.bracket-closure", samples, [&](CounterRng& r) {
    const MultiTensor b = pi14(f, randomTwoForm(r)), mu = pi14(f, randomTwoForm(r));
    return maxAbs(pi7(f, commutator(f, b, mu)));
  });
  auto actOn = [&](const MultiTensor& beta, const Vec& x) {
    // (β(X))^m = β_ij X^j g^{im}
    Vec bx("d");
    for (int i = 0; i < kDim; ++i) {
      double s = 0.0;
      for (int j = 0; j < kDim; ++j) s += beta(i, j) * x(j);
      bx(i) = s;
    }
    return raise1(f, bx);
  };
  run("twoforms.omega14.action=[b,X]", samples, [&](CounterRng& r) {
    const MultiTensor b = pi14(f, randomTwoForm(r));
    const Vec x = randomVector(r);
    return maxAbsDiff(vectorToTwoForm(f, actOn(b, x)), commutator(f, b, vectorToTwoForm(f, x)));
  });
  run("twoforms.omega7.action", samples, [&](CounterRng& r) {
    const MultiTensor b = pi7(f, randomTwoForm(r));
    const Vec x = randomVector(r);
    const MultiTensor xab = vectorToTwoForm(f, x);
    const MultiTensor rhs = commutator(f, b, xab) * -0.5 - outerSkew(vecOf(b), lower1(f, x)) * 1.5;
    return maxAbsDiff(vectorToTwoForm(f, actOn(b, x)), rhs);
  });
  run("twoforms.omega7.action-cross", samples, [&](CounterRng& r) {
    const MultiTensor b = pi7(f, randomTwoForm(r));
    const Vec x = randomVector(r);
    const Vec bvec = twoFormToVectorUnchecked(f, b);
    const MultiTensor lhs = outerSkew(lower1(f, bvec), lower1(f, x));
    const MultiTensor rhs = commutator(f, b, vectorToTwoForm(f, x)) * (-1.0 / 3.0) +
                            vectorToTwoForm(f, crossOf(f, bvec, x)) * (2.0 / 3.0);
    return maxAbsDiff(lhs, rhs);
  });
  run("twoforms.omega7.wedge-contraction", samples, [&](CounterRng& r) {
    const Vec bvec = randomVector(r), x = randomVector(r);
    const MultiTensor w = outerSkew(lower1(f, bvec), lower1(f, x));
    const Vec lhs = lower1(f, twoFormToVectorUnchecked(f, w));  // (1/6) w^{ij} φ_ijk
    const Vec rhs = lower1(f, crossOf(f, bvec, x));
    double m = 0.0;
    for (int k = 0; k < kDim; ++k) m = std::max(m, std::abs(lhs(k) - rhs(k) / 3.0));
    return m;
  });
  run("twoforms.pi7[b,X]=bxX", samples, [&](CounterRng& r) {
    const Vec bvec = randomVector(r), x = randomVector(r);
    const MultiTensor b = vectorToTwoForm(f, bvec);
    return maxAbsDiff(pi7(f, commutator(f, b, vectorToTwoForm(f, x))),
                      vectorToTwoForm(f, crossOf(f, bvec, x)));
  });
  run("threeforms.skew-C", samples, [&](CounterRng& r) {
    const MultiTensor c = randomTwoForm(r);
    const MultiTensor cp = betaPhi(c);  // C_il g^{lm} φ_mjk
    const Vec x = twoFormToVectorUnchecked(f, c) * -3.0;  // -(1/2) C^{ab} φ_ab^n
    const MultiTensor xp = vectorIntoPsi(f, x);
    double m = 0.0;
    forEachIndex(3, [&](const std::array<int, 4>& y, std::size_t flat) {
      const auto [i, j, k, u0] = y;
      const double lhs = cp(i, j, k) - cp(j, i, k) + cp(k, i, j);
      m = std::max(m, std::abs(lhs - xp[flat]));
    });
    return m;
  });
  return out;
}

}  // namespace g2flow
