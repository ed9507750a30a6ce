#pragma once

// Closed-form coefficient fields on R^7 and their 2-jets at a base point.

#include <array>
#include <vector>

#include "g2flow/jet_scalar.hpp"
#include "g2flow/tensor.hpp"

namespace g2flow {

using Point = std::array<double, kDim>;

/// coeff · x^power · exp(rate · x)
struct FieldTerm {
  std::array<int, kDim> power{};
  double coeff = 0.0;
  std::array<double, kDim> rate{};
};

/// A finite sum of FieldTerms.
struct ScalarField {
  std::vector<FieldTerm> terms;

  static ScalarField constant(double c) { return ScalarField{{FieldTerm{{}, c, {}}}}; }
  static ScalarField monomial(double c, std::array<int, kDim> power) { return ScalarField{{FieldTerm{power, c, {}}}}; }
  bool empty() const { return terms.empty(); }
};

inline std::array<Jet2, kDim> coordinateJets(const Point& x) {
  std::array<Jet2, kDim> v;
  for (int i = 0; i < kDim; ++i) v[i] = Jet2::variable(x[i], i);
  return v;
}

template <class S>
S evaluate(const ScalarField& f, const std::array<S, kDim>& x) {
  S acc(0.0);
  for (const FieldTerm& t : f.terms) {
    S term(t.coeff);
    S lin(0.0);
    bool hasExp = false;
    for (int i = 0; i < kDim; ++i) {
      for (int p = 0; p < t.power[i]; ++p) term *= x[i];
      if (t.rate[i] != 0.0) {
        lin += x[i] * t.rate[i];
        hasExp = true;
      }
    }
    if (hasExp) term *= expS(lin);
    acc += term;
  }
  return acc;
}

inline Jet2 jetAt(const ScalarField& f, const Point& x) { return evaluate(f, coordinateJets(x)); }
inline double valueAt(const ScalarField& f, const Point& x) {
  std::array<double, kDim> v = x;
  return evaluate(f, v);
}

/// A tensor whose components are ScalarFields, in the flat storage order of
/// BasicTensor. Empty components are zero.
struct TensorField {
  std::string slots;
  std::vector<ScalarField> comps;

  explicit TensorField(std::string s = "") : slots(std::move(s)), comps(ipow7(static_cast<int>(slots.size()))) {}

  template <class S>
  BasicTensor<S> evaluateAt(const std::array<S, kDim>& x) const {
    BasicTensor<S> t(slots);
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (!comps[i].empty()) t[i] = evaluate(comps[i], x);
    return t;
  }
  BasicTensor<Jet2> jetAt(const Point& x) const { return evaluateAt(coordinateJets(x)); }
};

/// Symmetric 2-tensor field: component (i,j) is mirrored to (j,i).
inline void setSymmetric(TensorField& h, int i, int j, const ScalarField& f) {
  h.comps[i * kDim + j] = f;
  h.comps[j * kDim + i] = f;
}

}  // namespace g2flow
