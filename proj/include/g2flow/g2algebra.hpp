#pragma once

// Pointwise G2 linear algebra: frame extraction from a positive 3-form, Hodge
// star, type decompositions of 2- and 3-forms, and the maps i and j.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "g2flow/jet_scalar.hpp"
#include "g2flow/tensor.hpp"

namespace g2flow {

/// Structure constants of the standard positive 3-form (0-based triples).
struct Phi0Term {
  int i, j, k;
  double sign;
};
inline constexpr std::array<Phi0Term, 7> kPhi0Terms{{
    {0, 1, 2, +1.0},
    {0, 3, 4, +1.0},
    {0, 5, 6, -1.0},
    {1, 3, 5, +1.0},
    {1, 4, 6, +1.0},
    {2, 3, 6, +1.0},
    {2, 4, 5, -1.0},
}};

/// Fully skew rank-3 tensor with prescribed sorted components.
inline MultiTensor skew3FromTerms(const std::array<Phi0Term, 7>& terms) {
  MultiTensor t("ddd", Symmetry::skew());
  for (const auto& [i, j, k, s] : terms) {
    t(i, j, k) = s;
    t(j, k, i) = s;
    t(k, i, j) = s;
    t(j, i, k) = -s;
    t(i, k, j) = -s;
    t(k, j, i) = -s;
  }
  return t;
}

inline MultiTensor phi0() { return skew3FromTerms(kPhi0Terms); }

/// Pullback of a covariant tensor by the linear map with matrix A (x ↦ A x).
template <class S>
BasicTensor<S> pullback(const BasicTensor<S>& t, const Eigen::Matrix<double, 7, 7>& A) {
  BasicTensor<S> cur = t;
  for (int slot = 0; slot < t.rank(); ++slot) {
    BasicTensor<S> next(t.rank(), t.variances(), t.symmetry());
    forEachIndex(t.rank(), [&](const std::array<int, 4>& idx, std::size_t flat) {
      S acc(0.0);
      auto src = idx;
      for (int a = 0; a < kDim; ++a) {
        const double w = A(a, idx[slot]);
        if (w == 0.0) continue;
        src[slot] = a;
        acc += w * cur.at(src);
      }
      next[flat] = acc;
    });
    cur = std::move(next);
  }
  return cur;
}

/// Pointwise data determined by a positive 3-form.
template <class S>
struct G2FrameT {
  BasicTensor<S> phi;    // φ_ijk
  BasicTensor<S> B;      // B_ij, coefficient of the top form
  BasicTensor<S> g;      // g_ij
  BasicTensor<S> gInv;   // g^ij
  S sqrtDetG;            // √det g; vol = √det g dx^1∧…∧dx^7
  BasicTensor<S> psi;    // ψ_ijkl
  BasicTensor<S> cross;  // P^l_ij stored as (l,i,j)

  S vol() const { return sqrtDetG; }
};
using G2Frame = G2FrameT<double>;

inline double minEigenvalue(const MultiTensor& m) {
  Eigen::Matrix<double, 7, 7> a;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// B_ij as the top coefficient of (e_i⌟φ)∧(e_j⌟φ)∧φ.
template <class S>
BasicTensor<S> bTensor(const BasicTensor<S>& phi) {
  const Form<S> f = toForm(phi);
  std::array<Form<S>, kDim> a;
  for (int i = 0; i < kDim; ++i) {
    std::array<double, kDim> e{};
    e[i] = 1.0;
    a[i] = interior(e, f);
  }
  BasicTensor<S> B("dd", Symmetry::symmetric());
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      const S v = wedge(wedge(a[i], a[j]), f)[0];
      B(i, j) = v;
      B(j, i) = v;
    }
  return B;
}

/// Extract the full frame. Throws NotPositive or DegenerateB.
template <class S>
G2FrameT<S> frameFromPhi(const BasicTensor<S>& phi) {
  G2FrameT<S> fr;
  fr.phi = phi;
  fr.phi.setSymmetry(Symmetry::skew());
  fr.B = bTensor(phi);
  auto [detB, BinvUnused] = [&] {
    try {
      return detAndInverse(toMat(fr.B));
    } catch (const Error&) {
      throw Error(ErrorCode::DegenerateB, "det(B) = 0");
    }
  }();
  (void)BinvUnused;
  if (!(valueOf(detB) < 0.0))
    throw Error(ErrorCode::NotPositive, "det(B) >= 0: 3-form is not positive for the coordinate orientation");
  const double c = std::pow(6.0, -2.0 / 9.0);
  const S scale = c / ratPowS(detB, 1, 9);
  fr.g = BasicTensor<S>("dd", Symmetry::symmetric());
  for (std::size_t i = 0; i < fr.g.size(); ++i) fr.g[i] = fr.B[i] * scale;
  const double lam = minEigenvalue(valuePart(fr.g));
  if (!(lam > 0.0))
    throw Error(ErrorCode::NotPositive, "metric not positive-definite, min eigenvalue " + std::to_string(lam));
  auto [detG, gi] = detAndInverse(toMat(fr.g));
  (void)detG;
  fr.gInv = fromMat(gi, "uu", Symmetry::symmetric());
  fr.sqrtDetG = ratPowS(detB * (-1.0 / std::pow(6.0, 7)), 1, 9);

  // φ with last index raised: φ_ij^a
  BasicTensor<S> phiUp("ddu");
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int a = 0; a < kDim; ++a) {
        S acc(0.0);
        for (int b = 0; b < kDim; ++b) acc += phi(i, j, b) * fr.gInv(b, a);
        phiUp(i, j, a) = acc;
      }
  fr.cross = BasicTensor<S>("udd");
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) fr.cross(l, i, j) = phiUp(i, j, l);

  fr.psi = BasicTensor<S>("dddd", Symmetry::skew());
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = k + 1; l < kDim; ++l) {
          S acc = fr.g(i, k) * fr.g(j, l) - fr.g(i, l) * fr.g(j, k);
          for (int a = 0; a < kDim; ++a) acc -= phiUp(i, j, a) * phi(k, l, a);
          fr.psi(i, j, k, l) = acc;
          fr.psi(j, i, k, l) = -acc;
          fr.psi(i, j, l, k) = -acc;
          fr.psi(j, i, l, k) = acc;
        }
  return fr;
}

/// Value part of a jet frame.
template <class S>
G2Frame frameValue(const G2FrameT<S>& f) {
  return G2Frame{valuePart(f.phi), valuePart(f.B),   valuePart(f.g),     valuePart(f.gInv),
                 valueOf(f.sqrtDetG), valuePart(f.psi), valuePart(f.cross)};
}

// ---------------------------------------------------------------------------
// Index gymnastics

/// v^i = g^{ij} v_j and the converse.
template <class S>
BasicTensor<S> raise1(const G2FrameT<S>& f, const BasicTensor<S>& v) {
  BasicTensor<S> r("u");
  for (int i = 0; i < kDim; ++i) {
    S acc(0.0);
    for (int j = 0; j < kDim; ++j) acc += f.gInv(i, j) * v(j);
    r(i) = acc;
  }
  return r;
}
template <class S>
BasicTensor<S> lower1(const G2FrameT<S>& f, const BasicTensor<S>& v) {
  BasicTensor<S> r("d");
  for (int i = 0; i < kDim; ++i) {
    S acc(0.0);
    for (int j = 0; j < kDim; ++j) acc += f.g(i, j) * v(j);
    r(i) = acc;
  }
  return r;
}

/// Raise one slot of a tensor with g⁻¹ (or lower with g if it is already up).
template <class S>
BasicTensor<S> raiseSlot(const G2FrameT<S>& f, const BasicTensor<S>& t, int slot) {
  const bool up = t.variance(slot) == Variance::Covariant;
  const BasicTensor<S>& m = up ? f.gInv : f.g;
  auto var = t.variances();
  var[slot] = up ? Variance::Contravariant : Variance::Covariant;
  BasicTensor<S> r(t.rank(), var);
  forEachIndex(t.rank(), [&](const std::array<int, 4>& idx, std::size_t flat) {
    S acc(0.0);
    auto src = idx;
    for (int a = 0; a < kDim; ++a) {
      src[slot] = a;
      acc += m(idx[slot], a) * t.at(src);
    }
    r[flat] = acc;
  });
  return r;
}

/// A g⁻¹ B for two covariant 2-tensors.
template <class S>
BasicTensor<S> matMulG(const G2FrameT<S>& f, const BasicTensor<S>& a, const BasicTensor<S>& b) {
  BasicTensor<S> ag("du");
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      S acc(0.0);
      for (int j = 0; j < kDim; ++j) acc += a(i, j) * f.gInv(j, k);
      ag(i, k) = acc;
    }
  BasicTensor<S> r("dd");
  for (int i = 0; i < kDim; ++i)
    for (int l = 0; l < kDim; ++l) {
      S acc(0.0);
      for (int k = 0; k < kDim; ++k) acc += ag(i, k) * b(k, l);
      r(i, l) = acc;
    }
  return r;
}

/// [A,B] = A g⁻¹ B − B g⁻¹ A and {A,B} = A g⁻¹ B + B g⁻¹ A.
template <class S>
BasicTensor<S> commutator(const G2FrameT<S>& f, const BasicTensor<S>& a, const BasicTensor<S>& b) {
  return matMulG(f, a, b) - matMulG(f, b, a);
}
template <class S>
BasicTensor<S> anticommutator(const G2FrameT<S>& f, const BasicTensor<S>& a, const BasicTensor<S>& b) {
  return matMulG(f, a, b) + matMulG(f, b, a);
}

/// Tr_g A = g^{ij} A_ij.
template <class S>
S traceG(const G2FrameT<S>& f, const BasicTensor<S>& a) {
  S acc(0.0);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) acc += f.gInv(i, j) * a(i, j);
  return acc;
}

/// Matrix inner product A_ij B_kl g^{ik} g^{jl}.
template <class S>
S matInner(const G2FrameT<S>& f, const BasicTensor<S>& a, const BasicTensor<S>& b) {
  const BasicTensor<S> up = raiseSlot(f, raiseSlot(f, b, 0), 1);
  S acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * up[i];
  return acc;
}

/// 2-tensor contracted with ψ on its first two slots: (Aψ)_pq = A_ij g^{ia} g^{jb} ψ_abpq.
template <class S>
BasicTensor<S> psiAction(const G2FrameT<S>& f, const BasicTensor<S>& a) {
  BasicTensor<S> up("uu");
  for (int p = 0; p < kDim; ++p)
    for (int q = 0; q < kDim; ++q) {
      S acc(0.0);
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) acc += f.gInv(p, i) * a(i, j) * f.gInv(j, q);
      up(p, q) = acc;
    }
  BasicTensor<S> r("dd");
  for (int p = 0; p < kDim; ++p)
    for (int q = 0; q < kDim; ++q) {
      S acc(0.0);
      for (int a2 = 0; a2 < kDim; ++a2)
        for (int b = 0; b < kDim; ++b) acc += up(a2, b) * f.psi(a2, b, p, q);
      r(p, q) = acc;
    }
  return r;
}

// ---------------------------------------------------------------------------
// Hodge star and inner products on forms

namespace detail {
template <class S>
S subDet(const BasicTensor<S>& m, unsigned rows, unsigned cols) {
  std::array<int, kDim> r{}, c{};
  int n = 0, nc = 0;
  for (int b = 0; b < kDim; ++b) {
    if (rows & (1u << b)) r[n++] = b;
    if (cols & (1u << b)) c[nc++] = b;
  }
  if (n == 0) return S(1.0);
  const auto& tab = permTable(n);
  S acc(0.0);
  for (std::size_t p = 0; p < tab.perms.size(); ++p) {
    S prod(static_cast<double>(tab.signs[p]));
    for (int i = 0; i < n; ++i) prod = prod * m(r[i], c[tab.perms[p][i]]);
    acc += prod;
  }
  return acc;
}
}  // namespace detail

/// α with all indices raised, in sorted-index storage.
template <class S>
Form<S> raiseForm(const G2FrameT<S>& f, const Form<S>& a) {
  Form<S> out(a.degree());
  for (std::size_t i = 0; i < a.size(); ++i) {
    S acc(0.0);
    for (std::size_t j = 0; j < a.size(); ++j)
      acc += detail::subDet(f.gInv, a.maskAt(i), a.maskAt(j)) * a[j];
    out[i] = acc;
  }
  return out;
}

/// g(α, β) with the 1/k! convention.
template <class S>
S formInner(const G2FrameT<S>& f, const Form<S>& a, const Form<S>& b) {
  if (a.degree() != b.degree()) throw Error(ErrorCode::DegreeOverflow, "degree mismatch");
  const Form<S> up = raiseForm(f, a);
  S acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += up[i] * b[i];
  return acc;
}

template <class S>
Form<S> hodgeStar(const G2FrameT<S>& f, const Form<S>& a) {
  const Form<S> up = raiseForm(f, a);
  Form<S> out(kDim - a.degree());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const unsigned m = a.maskAt(i);
    const unsigned mc = 0x7Fu & ~m;
    out.byMask(mc) += static_cast<double>(detail::shuffleSign(m, mc)) * (up[i] * f.sqrtDetG);
  }
  return out;
}

/// vol as a 7-form.
template <class S>
Form<S> volumeForm(const G2FrameT<S>& f) {
  Form<S> v(7);
  v[0] = f.sqrtDetG;
  return v;
}

// ---------------------------------------------------------------------------
// 2-forms: Ω²₇ ⊕ Ω²₁₄

template <class S>
struct TwoFormSplit {
  BasicTensor<S> beta7;
  BasicTensor<S> beta14;
};

template <class S>
TwoFormSplit<S> projectTwoForm(const G2FrameT<S>& f, const BasicTensor<S>& beta) {
  const BasicTensor<S> bp = psiAction(f, beta);
  TwoFormSplit<S> r{BasicTensor<S>("dd", Symmetry::skew()), BasicTensor<S>("dd", Symmetry::skew())};
  for (std::size_t i = 0; i < beta.size(); ++i) {
    r.beta7[i] = beta[i] * (1.0 / 3.0) - bp[i] * (1.0 / 6.0);
    r.beta14[i] = beta[i] * (2.0 / 3.0) + bp[i] * (1.0 / 6.0);
  }
  return r;
}
template <class S>
BasicTensor<S> pi7(const G2FrameT<S>& f, const BasicTensor<S>& beta) {
  return projectTwoForm(f, beta).beta7;
}
template <class S>
BasicTensor<S> pi14(const G2FrameT<S>& f, const BasicTensor<S>& beta) {
  return projectTwoForm(f, beta).beta14;
}

/// X_ab = X^l φ_lab.
template <class S>
BasicTensor<S> vectorToTwoForm(const G2FrameT<S>& f, const BasicTensor<S>& x) {
  BasicTensor<S> r("dd", Symmetry::skew());
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      S acc(0.0);
      for (int l = 0; l < kDim; ++l) acc += x(l) * f.phi(l, a, b);
      r(a, b) = acc;
    }
  return r;
}

/// X^k = (1/6) X_ab φ_mpq g^{ap} g^{bq} g^{mk}, without the Ω²₇ membership check.
template <class S>
BasicTensor<S> twoFormToVectorUnchecked(const G2FrameT<S>& f, const BasicTensor<S>& beta) {
  const BasicTensor<S> up = raiseSlot(f, raiseSlot(f, beta, 0), 1);
  BasicTensor<S> xl("d");
  for (int m = 0; m < kDim; ++m) {
    S acc(0.0);
    for (int p = 0; p < kDim; ++p)
      for (int q = 0; q < kDim; ++q) acc += up(p, q) * f.phi(m, p, q);
    xl(m) = acc * (1.0 / 6.0);
  }
  return raise1(f, xl);
}

inline MultiTensor twoFormToVector(const G2Frame& f, const MultiTensor& beta, double tol = 1e-10) {
  const double scale = std::max(1.0, maxAbs(beta));
  if (maxAbs(pi14(f, beta)) > tol * scale)
    throw Error(ErrorCode::NotInOmega27, "2-form has a nonzero Ω²₁₄ component");
  return twoFormToVectorUnchecked(f, beta);
}

// ---------------------------------------------------------------------------
// 3-forms: the maps i and j, and Ω³ = i(S²) ⊕ Ω³₇

inline void requireSymmetric(const MultiTensor& h, double tol = 1e-12) {
  const double scale = std::max(1.0, maxAbs(h));
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(h(i, j) - h(j, i)) > tol * scale)
        throw Error(ErrorCode::NonSymmetric, "2-tensor is not symmetric");
}
template <class S>
void requireSymmetric(const BasicTensor<S>& h) {
  requireSymmetric(valuePart(h));
}

/// h^l_i = g^{lm} h_mi, stored as (l,i).
template <class S>
BasicTensor<S> mixed(const G2FrameT<S>& f, const BasicTensor<S>& h) {
  BasicTensor<S> r("ud");
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i) {
      S acc(0.0);
      for (int m = 0; m < kDim; ++m) acc += f.gInv(l, m) * h(m, i);
      r(l, i) = acc;
    }
  return r;
}

/// i(h)_ijk = h^l_i φ_ljk + h^l_j φ_ilk + h^l_k φ_ijl.
template <class S>
BasicTensor<S> iMapUnchecked(const G2FrameT<S>& f, const BasicTensor<S>& h) {
  const BasicTensor<S> hm = mixed(f, h);
  // A_ijk = h^l_i φ_ljk; i(h) is its cyclic sum since φ is skew.
  BasicTensor<S> a("ddd");
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = j + 1; k < kDim; ++k) {
        S acc(0.0);
        for (int l = 0; l < kDim; ++l) acc += hm(l, i) * f.phi(l, j, k);
        a(i, j, k) = acc;
        a(i, k, j) = -acc;
      }
  BasicTensor<S> r("ddd", Symmetry::skew());
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) r(i, j, k) = a(i, j, k) + a(j, k, i) + a(k, i, j);
  return r;
}
template <class S>
BasicTensor<S> iMap(const G2FrameT<S>& f, const BasicTensor<S>& h) {
  requireSymmetric(h);
  return iMapUnchecked(f, h);
}

/// (X⌟ψ)_ijk = X^l ψ_lijk.
template <class S>
BasicTensor<S> vectorIntoPsi(const G2FrameT<S>& f, const BasicTensor<S>& x) {
  BasicTensor<S> r("ddd", Symmetry::skew());
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        S acc(0.0);
        for (int l = 0; l < kDim; ++l) acc += x(l) * f.psi(l, i, j, k);
        r(i, j, k) = acc;
      }
  return r;
}

/// j(η)_ij = *((e_i⌟φ)∧(e_j⌟φ)∧η).
template <class S>
BasicTensor<S> jMap(const G2FrameT<S>& f, const BasicTensor<S>& eta) {
  const Form<S> pf = toForm(f.phi);
  const Form<S> ef = toForm(eta);
  std::array<Form<S>, kDim> a;
  for (int i = 0; i < kDim; ++i) {
    std::array<double, kDim> e{};
    e[i] = 1.0;
    a[i] = interior(e, pf);
  }
  const S inv = S(1.0) / f.sqrtDetG;
  BasicTensor<S> r("dd", Symmetry::symmetric());
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      const S v = wedge(wedge(a[i], a[j]), ef)[0] * inv;
      r(i, j) = v;
      r(j, i) = v;
    }
  return r;
}

template <class S>
struct ThreeFormSplit {
  BasicTensor<S> h;  // symmetric, covariant
  BasicTensor<S> X;  // vector
};

template <class S>
ThreeFormSplit<S> decomposeThreeForm(const G2FrameT<S>& f, const BasicTensor<S>& eta) {
  const BasicTensor<S> j = jMap(f, eta);
  const S trH = traceG(f, j) * (-1.0 / 18.0);
  ThreeFormSplit<S> out{BasicTensor<S>("dd", Symmetry::symmetric()), BasicTensor<S>("u")};
  for (std::size_t i = 0; i < j.size(); ++i) out.h[i] = (j[i] + 2.0 * trH * f.g[i]) * (-0.25);
  const BasicTensor<S> rest = eta - iMapUnchecked(f, out.h);
  // X_n = (1/24) r^{ijk} ψ_nijk
  const BasicTensor<S> up = raiseSlot(f, raiseSlot(f, raiseSlot(f, rest, 0), 1), 2);
  BasicTensor<S> xl("d");
  for (int n = 0; n < kDim; ++n) {
    S acc(0.0);
    forEachIndex(3, [&](const std::array<int, 4>& idx, std::size_t flat) {
      acc += up[flat] * f.psi(n, idx[0], idx[1], idx[2]);
    });
    xl(n) = acc * (1.0 / 24.0);
  }
  out.X = raise1(f, xl);
  return out;
}

}  // namespace g2flow
