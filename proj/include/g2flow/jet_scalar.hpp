#pragma once

// Truncated Taylor scalars: Jet1 carries (value, gradient), Jet2Scalar adds the
// Hessian. Arithmetic propagates derivatives exactly (forward mode).

#include <array>
#include <cmath>

#include "g2flow/tensor.hpp"

namespace g2flow {

struct Jet1 {
  double value = 0.0;
  std::array<double, kDim> grad{};

  Jet1() = default;
  Jet1(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  static Jet1 variable(double v, int i) {
    Jet1 j(v);
    j.grad[i] = 1.0;
    return j;
  }

  Jet1& operator+=(const Jet1& o) {
    value += o.value;
    for (int i = 0; i < kDim; ++i) grad[i] += o.grad[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& o) {
    value -= o.value;
    for (int i = 0; i < kDim; ++i) grad[i] -= o.grad[i];
    return *this;
  }
  Jet1& operator*=(double c) {
    value *= c;
    for (auto& x : grad) x *= c;
    return *this;
  }
  Jet1& operator*=(const Jet1& o) {
    for (int i = 0; i < kDim; ++i) grad[i] = grad[i] * o.value + value * o.grad[i];
    value *= o.value;
    return *this;
  }
  Jet1& operator/=(const Jet1& o);
};

inline Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
inline Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
inline Jet1 operator-(Jet1 a) { return a *= -1.0; }
inline Jet1 operator*(Jet1 a, const Jet1& b) { return a *= b; }
inline Jet1 operator*(Jet1 a, double c) { return a *= c; }
inline Jet1 operator*(double c, Jet1 a) { return a *= c; }
inline Jet1 operator+(Jet1 a, double c) { a.value += c; return a; }
inline Jet1 operator+(double c, Jet1 a) { a.value += c; return a; }
inline Jet1 operator-(Jet1 a, double c) { a.value -= c; return a; }
inline Jet1 operator-(double c, const Jet1& a) { return -a + c; }

/// f(a) from f(a.value) and f'(a.value).
inline Jet1 chain(const Jet1& a, double f0, double f1) {
  Jet1 r(f0);
  for (int i = 0; i < kDim; ++i) r.grad[i] = f1 * a.grad[i];
  return r;
}
inline Jet1 reciprocal(const Jet1& a) {
  const double v = a.value;
  return chain(a, 1.0 / v, -1.0 / (v * v));
}
inline Jet1& Jet1::operator/=(const Jet1& o) { return *this *= reciprocal(o); }
inline Jet1 operator/(Jet1 a, const Jet1& b) { return a /= b; }
inline Jet1 operator/(Jet1 a, double c) { return a *= 1.0 / c; }
inline Jet1 operator/(double c, const Jet1& a) { return reciprocal(a) * c; }
inline double valueOf(const Jet1& a) { return a.value; }

struct Jet2Scalar {
  double value = 0.0;
  std::array<double, kDim> grad{};
  std::array<std::array<double, kDim>, kDim> hess{};

  Jet2Scalar() = default;
  Jet2Scalar(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  /// The coordinate function x^i shifted to take value v at the base point.
  static Jet2Scalar variable(double v, int i) {
    Jet2Scalar j(v);
    j.grad[i] = 1.0;
    return j;
  }

  Jet2Scalar& operator+=(const Jet2Scalar& o) {
    value += o.value;
    for (int i = 0; i < kDim; ++i) {
      grad[i] += o.grad[i];
      for (int j = 0; j < kDim; ++j) hess[i][j] += o.hess[i][j];
    }
    return *this;
  }
  Jet2Scalar& operator-=(const Jet2Scalar& o) {
    value -= o.value;
    for (int i = 0; i < kDim; ++i) {
      grad[i] -= o.grad[i];
      for (int j = 0; j < kDim; ++j) hess[i][j] -= o.hess[i][j];
    }
    return *this;
  }
  Jet2Scalar& operator*=(double c) {
    value *= c;
    for (int i = 0; i < kDim; ++i) {
      grad[i] *= c;
      for (int j = 0; j < kDim; ++j) hess[i][j] *= c;
    }
    return *this;
  }
  Jet2Scalar& operator*=(const Jet2Scalar& o) {
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        hess[i][j] = hess[i][j] * o.value + value * o.hess[i][j] + grad[i] * o.grad[j] +
                     o.grad[i] * grad[j];
    for (int i = 0; i < kDim; ++i) grad[i] = grad[i] * o.value + value * o.grad[i];
    value *= o.value;
    return *this;
  }
  Jet2Scalar& operator/=(const Jet2Scalar& o);
};

using Jet2 = Jet2Scalar;

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator-(Jet2 a) { return a *= -1.0; }
inline Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
inline Jet2 operator*(Jet2 a, double c) { return a *= c; }
inline Jet2 operator*(double c, Jet2 a) { return a *= c; }
inline Jet2 operator+(Jet2 a, double c) { a.value += c; return a; }
inline Jet2 operator+(double c, Jet2 a) { a.value += c; return a; }
inline Jet2 operator-(Jet2 a, double c) { a.value -= c; return a; }
inline Jet2 operator-(double c, const Jet2& a) { return -a + c; }

/// f(a) from f, f', f'' at a.value.
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  Jet2 r(f0);
  for (int i = 0; i < kDim; ++i) {
    r.grad[i] = f1 * a.grad[i];
    for (int j = 0; j < kDim; ++j) r.hess[i][j] = f1 * a.hess[i][j] + f2 * a.grad[i] * a.grad[j];
  }
  return r;
}
inline Jet2 reciprocal(const Jet2& a) {
  const double v = a.value;
  return chain(a, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}
inline Jet2& Jet2::operator/=(const Jet2& o) { return *this *= reciprocal(o); }
inline Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }
inline Jet2 operator/(Jet2 a, double c) { return a *= 1.0 / c; }
inline Jet2 operator/(double c, const Jet2& a) { return reciprocal(a) * c; }
inline double valueOf(const Jet2& a) { return a.value; }

// Elementary functions, overloaded for double and both jet types.

inline double sqrtS(double x) { return std::sqrt(x); }
inline Jet1 sqrtS(const Jet1& a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s);
}
inline Jet2 sqrtS(const Jet2& a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.value));
}

/// x^(num/den) with the sign rule of rationalPow.
inline double ratPowS(double x, int num, int den) { return rationalPow(x, num, den); }
inline Jet1 ratPowS(const Jet1& a, int num, int den) {
  const double p = static_cast<double>(num) / den;
  const double f0 = rationalPow(a.value, num, den);
  return chain(a, f0, p * f0 / a.value);
}
inline Jet2 ratPowS(const Jet2& a, int num, int den) {
  const double p = static_cast<double>(num) / den;
  const double v = a.value;
  const double f0 = rationalPow(v, num, den);
  return chain(a, f0, p * f0 / v, p * (p - 1.0) * f0 / (v * v));
}

inline double logS(double x) { return std::log(x); }
inline Jet1 logS(const Jet1& a) { return chain(a, std::log(a.value), 1.0 / a.value); }
inline Jet2 logS(const Jet2& a) {
  return chain(a, std::log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value));
}

inline double expS(double x) { return std::exp(x); }
inline Jet1 expS(const Jet1& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e);
}
inline Jet2 expS(const Jet2& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e, e);
}

// Jet bookkeeping.

inline Jet1 truncate(const Jet2& a) {
  Jet1 r(a.value);
  r.grad = a.grad;
  return r;
}
inline double truncate(const Jet1& a) { return a.value; }

/// ∂_m of a 2-jet, as a 1-jet.
inline Jet1 partial(const Jet2& a, int m) {
  Jet1 r(a.grad[m]);
  r.grad = a.hess[m];
  return r;
}
inline double partial(const Jet1& a, int m) { return a.grad[m]; }

template <class S>
struct Lower;  // jet of one order less
template <>
struct Lower<Jet2> { using type = Jet1; };
template <>
struct Lower<Jet1> { using type = double; };
template <class S>
using LowerT = typename Lower<S>::type;

template <class S>
BasicTensor<LowerT<S>> truncate(const BasicTensor<S>& t) {
  return t.map([](const S& x) { return truncate(x); });
}

/// Tensor of ∂_m of every component.
template <class S>
BasicTensor<LowerT<S>> partial(const BasicTensor<S>& t, int m) {
  return t.map([m](const S& x) { return partial(x, m); });
}

/// Constant jet from a double tensor.
template <class S>
BasicTensor<S> constantJet(const MultiTensor& t) {
  return t.map([](double x) { return S(x); });
}

}  // namespace g2flow
