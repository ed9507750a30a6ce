#pragma once

// Counter-based random numbers: draw k of stream s under seed is a pure
// function of (seed, s, k), so samples are independent of evaluation order.

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "g2flow/g2algebra.hpp"

namespace g2flow {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t k) const {
    return splitmix64(seed_ ^ splitmix64(stream_ * 0xD1B54A32D192ED03ull ^ splitmix64(k)));
  }
  /// Uniform in [-1, 1).
  double uniform() { return 2.0 * static_cast<double>(bits(counter_++) >> 11) * 0x1.0p-53 - 1.0; }
  double normal() {
    const double u1 = 0.5 * (uniform() + 1.0);
    const double u2 = 0.5 * (uniform() + 1.0);
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  int index(int n) { return static_cast<int>(bits(counter_++) % static_cast<std::uint64_t>(n)); }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

inline MultiTensor randomVector(CounterRng& r, std::string_view slot = "u") {
  MultiTensor v(slot);
  for (int i = 0; i < kDim; ++i) v(i) = r.uniform();
  return v;
}

inline MultiTensor randomSymmetric(CounterRng& r) {
  MultiTensor h("dd", Symmetry::symmetric());
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) h(i, j) = h(j, i) = r.uniform();
  return h;
}

inline MultiTensor randomTwoForm(CounterRng& r) {
  MultiTensor b("dd", Symmetry::skew());
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j) {
      b(i, j) = r.uniform();
      b(j, i) = -b(i, j);
    }
  return b;
}

inline FormD randomForm(CounterRng& r, int k) {
  FormD f(k);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = r.uniform();
  return f;
}

inline MultiTensor randomTensor(CounterRng& r, std::string_view slots) {
  MultiTensor t(slots);
  for (auto& x : t.data()) x = r.uniform();
  return t;
}

using Mat7d = Eigen::Matrix<double, 7, 7>;

/// exp(εM) with M uniform in [-1,1]^(7×7).
inline Mat7d randomNearIdentity(CounterRng& r, double eps) {
  Mat7d m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) m(i, j) = eps * r.uniform();
  return m.exp();
}

/// A positive 3-form in the GL(7)-orbit of φ₀.
inline MultiTensor randomPositivePhi(CounterRng& r, double eps = 0.3) {
  MultiTensor p = pullback(phi0(), randomNearIdentity(r, eps));
  p.setSymmetry(Symmetry::skew());
  return p;
}

}  // namespace g2flow
