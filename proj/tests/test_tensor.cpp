#include <gtest/gtest.h>

#include "g2flow/g2algebra.hpp"
#include "g2flow/random.hpp"
#include "g2flow/tensor.hpp"

using namespace g2flow;

namespace {

MultiTensor identityUD() {
  MultiTensor d("ud");
  for (int i = 0; i < kDim; ++i) d(i, i) = 1.0;
  return d;
}

// Naive oracle for contracting the last slot of a with the first of b.
MultiTensor naiveLastFirst(const MultiTensor& a, const MultiTensor& b) {
  std::string slots = a.slots().substr(0, a.rank() - 1) + b.slots().substr(1);
  MultiTensor out(slots);
  forEachIndex(out.rank(), [&](const std::array<int, 4>& o, std::size_t flat) {
    double acc = 0.0;
    for (int s = 0; s < kDim; ++s) {
      std::array<int, 4> ai{}, bi{};
      for (int i = 0; i < a.rank() - 1; ++i) ai[i] = o[i];
      ai[a.rank() - 1] = s;
      bi[0] = s;
      for (int i = 1; i < b.rank(); ++i) bi[i] = o[a.rank() - 1 + i - 1];
      acc += a.at(ai) * b.at(bi);
    }
    out[flat] = acc;
  });
  return out;
}

int inversions(const std::array<int, 7>& p) {
  int n = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) n += p[i] > p[j];
  return n;
}

}  // namespace

TEST(Contract, InverseMetricGivesKronecker) {
  CounterRng r(1, 0);
  const G2Frame f = frameFromPhi(randomPositivePhi(r));
  const MultiTensor d = contract(f.gInv, f.g, {{1, 0}});
  EXPECT_LT(maxAbsDiff(d, identityUD()), 1e-12);
  EXPECT_EQ(d.variance(0), Variance::Contravariant);
  EXPECT_EQ(d.variance(1), Variance::Covariant);
}

TEST(Contract, AgreesWithNaiveLoop) {
  CounterRng r(2, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const MultiTensor a = randomTensor(r, "ddu");
    const MultiTensor b = randomTensor(r, "dd");
    const MultiTensor c = contract(a, b, {{2, 0}});
    const MultiTensor ref = naiveLastFirst(a, b);
    EXPECT_LE(maxAbsDiff(c, ref), 1e-13 * std::max(1.0, maxAbs(ref)));
  }
}

TEST(Contract, TripleAndQuadrupleSelfContractions) {
  const G2Frame f = frameFromPhi(phi0());
  const MultiTensor p3 = contract(f.phi, f.phi, {{0, 0}, {1, 1}, {2, 2}}, &f.gInv);
  EXPECT_NEAR(p3[0], 42.0, 1e-12);
  const MultiTensor p4 = contract(f.psi, f.psi, {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, &f.gInv);
  EXPECT_NEAR(p4[0], 168.0, 1e-11);
}

TEST(Contract, Errors) {
  const MultiTensor a("dddd"), b("dddd");
  EXPECT_THROW(contract(a, b, {{0, 0}}), Error);  // rank 6
  const MultiTensor u("d"), v("d");
  try {
    contract(u, v, {{0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VarianceMismatch);
  }
}

TEST(Contract, RankZeroActsAsScalar) {
  CounterRng r(3, 0);
  const MultiTensor s = MultiTensor::scalar(2.5);
  const MultiTensor a = randomTensor(r, "dd");
  const MultiTensor c = contract(s, a, {});
  EXPECT_LT(maxAbsDiff(c, a * 2.5), 1e-15);
}

TEST(Symmetrization, IdempotenceAndOrthogonality) {
  CounterRng r(4, 0);
  const MultiTensor t = randomTensor(r, "ddd");
  const MultiTensor a = alternate(t);
  EXPECT_LT(maxAbsDiff(alternate(a), a), 1e-15);
  const MultiTensor s = symmetrize(t);
  EXPECT_LT(maxAbsDiff(symmetrize(s), s), 1e-15);
  const MultiTensor m = randomTensor(r, "dd");
  EXPECT_LT(maxAbs(alternate(symmetrize(m))), 1e-15);
  const MultiTensor sm = symmetrize(m);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) EXPECT_DOUBLE_EQ(sm(i, j), 0.5 * (m(i, j) + m(j, i)));
  EXPECT_LT(maxAbsDiff(alternate(phi0()), phi0()), 1e-15);
  EXPECT_LT(symmetryViolation(phi0()), 1e-13);
}

TEST(Forms, WedgeBasics) {
  EXPECT_EQ(maxAbs(wedge(basisForm(0), basisForm(0))), 0.0);
  CounterRng r(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const FormD a = randomForm(r, 2), b = randomForm(r, 3), c = randomForm(r, 1);
    EXPECT_LT(maxAbs(wedge(wedge(a, b), c) - wedge(a, wedge(b, c))), 1e-12);
    EXPECT_LT(maxAbs(wedge(b, c) + wedge(c, b)), 1e-12);  // (-1)^{3*1}
    EXPECT_LT(maxAbs(wedge(a, c) - wedge(c, a)), 1e-12);
  }
  EXPECT_THROW(wedge(randomForm(r, 4), randomForm(r, 4)), Error);
}

TEST(Forms, InteriorComponentsAndDerivationRule) {
  CounterRng r(6, 0);
  const FormD w = randomForm(r, 3);
  std::array<double, 7> e{};
  e[2] = 1.0;
  const FormD iw = interior(e, w);
  EXPECT_DOUBLE_EQ(iw.component({0, 5}), w.component({2, 0, 5}));
  for (int trial = 0; trial < 10; ++trial) {
    const FormD om = randomForm(r, 3);
    std::array<double, 7> v{};
    double n2 = 0.0;
    for (auto& x : v) {
      x = r.uniform();
      n2 += x * x;
    }
    const FormD vb = oneForm<double>(v);
    const FormD lhs = interior(v, wedge(vb, om)) + wedge(vb, interior(v, om));
    EXPECT_LT(maxAbs(lhs - om * n2), 1e-12);
  }
}

TEST(Forms, TensorRoundTrip) {
  const FormD f = toForm(phi0());
  EXPECT_LT(maxAbsDiff(toTensor(f), phi0()), 1e-15);
}

TEST(PermSum, BMatrixOfStandardForm) {
  const MultiTensor p = phi0();
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      const double v = signedPermSum({{&p, {fixedSlot(i), permSlot(0), permSlot(1)}},
                                      {&p, {fixedSlot(j), permSlot(2), permSlot(3)}},
                                      {&p, {permSlot(4), permSlot(5), permSlot(6)}}}) /
                       24.0;
      EXPECT_NEAR(v, i == j ? -6.0 : 0.0, 1e-12);
    }
}

TEST(PermSum, BitIdenticalToDirectLoop) {
  CounterRng r(7, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const MultiTensor a = alternate(randomTensor(r, "ddd"));
    const MultiTensor b = alternate(randomTensor(r, "ddd"));
    const MultiTensor c = alternate(randomTensor(r, "ddd"));
    const int i = r.index(7), j = r.index(7);
    const double got = signedPermSum({{&a, {fixedSlot(i), permSlot(0), permSlot(1)}},
                                      {&b, {fixedSlot(j), permSlot(2), permSlot(3)}},
                                      {&c, {permSlot(4), permSlot(5), permSlot(6)}}});
    double ref = 0.0;
    std::array<int, 7> s{};
    std::iota(s.begin(), s.end(), 0);
    do {
      const double sign = (inversions(s) & 1) ? -1.0 : 1.0;
      double prod = sign;
      prod *= a(i, s[0], s[1]);
      if (prod != 0.0) prod *= b(j, s[2], s[3]);
      if (prod != 0.0) prod *= c(s[4], s[5], s[6]);
      ref += prod;
    } while (std::next_permutation(s.begin(), s.end()));
    EXPECT_EQ(got, ref);
  }
}

TEST(PermSum, SlotCountMismatch) {
  const MultiTensor p = phi0();
  EXPECT_THROW(signedPermSum({{&p, {fixedSlot(0), permSlot(0), permSlot(1)}}}), Error);
}

TEST(MatInvDetPow, Examples) {
  MultiTensor id("dd");
  for (int i = 0; i < kDim; ++i) id(i, i) = 1.0;
  auto r1 = matInvDetPow(id, 1, 9);
  EXPECT_DOUBLE_EQ(r1.det, 1.0);
  EXPECT_DOUBLE_EQ(r1.detPow, 1.0);
  EXPECT_LT(maxAbsDiff(r1.inverse, [&] { MultiTensor u("uu"); for (int i = 0; i < kDim; ++i) u(i, i) = 1; return u; }()), 1e-15);
  auto r2 = matInvDetPow(id * 4.0, 1, 9);
  EXPECT_NEAR(r2.det, std::pow(4.0, 7), 1e-9);
  EXPECT_NEAR(r2.detPow, std::pow(4.0, 7.0 / 9.0), 1e-13);
  const G2Frame f = frameFromPhi(phi0());
  auto r3 = matInvDetPow(f.B, 1, 9);
  EXPECT_NEAR(r3.det, -std::pow(6.0, 7), 1e-8);
  EXPECT_NEAR(r3.detPow, -std::pow(6.0, 7.0 / 9.0), 1e-12);
  EXPECT_THROW(matInvDetPow(f.B, 1, 2), Error);
  EXPECT_THROW(matInvDetPow(MultiTensor("dd")), Error);
}

TEST(MatInvDetPow, InverseResidual) {
  CounterRng r(8, 0);
  const MultiTensor m = randomSymmetric(r) + [&] { MultiTensor d("dd"); for (int i = 0; i < kDim; ++i) d(i, i) = 3.0; return d; }();
  auto res = matInvDetPow(m);
  const MultiTensor prod = contract(m, res.inverse, {{1, 0}});
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) EXPECT_NEAR(prod(i, j), i == j ? 1.0 : 0.0, 1e-12);
}
