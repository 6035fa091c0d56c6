#include <gtest/gtest.h>

#include <random>

#include "kmono/ktheory.hpp"

using namespace kmono;

namespace {

std::vector<std::pair<int, int>> small_cases(int nmax) {
  std::vector<std::pair<int, int>> v;
  for (int n = 1; n <= nmax; ++n)
    for (int k = 1; k <= n; ++k) v.push_back({k, n});
  return v;
}

}  // namespace

TEST(KTheory, Restrict) {
  auto& c = trig_context(1, 2);
  auto x = restrict_class(c, c.T(1));
  EXPECT_EQ(x[0], c.Z(1));
  EXPECT_EQ(x[1], c.Z(2));
  EXPECT_EQ(restrict_class(c, c.one()), KTheoryClass::unit(c));
  auto& c2 = trig_context(2, 3);
  auto y = restrict_class(c2, c2.T(1) * c2.T(2));
  EXPECT_EQ(y[0], c2.Z(1) * c2.Z(2));
  EXPECT_EQ(y[1], c2.Z(1) * c2.Z(3));
  EXPECT_EQ(y[2], c2.Z(2) * c2.Z(3));
  EXPECT_THROW(restrict_class(c2, c2.T(1)), NotSymmetric);
  // Gamma-bar side
  auto yb = restrict_class(c2, c2.Tb(1));
  EXPECT_EQ(yb[0], c2.Z(3));
  EXPECT_EQ(yb[2], c2.Z(1));
}

TEST(KTheory, Admissible) {
  auto& c = trig_context(1, 2);
  Poly zero(c.ring());
  EXPECT_TRUE(is_admissible(c, {c.Z(1), c.Z(2)}));
  EXPECT_FALSE(is_admissible(c, {c.one(), zero}));
  EXPECT_TRUE(is_admissible(c, {c.one() - c.Z(2) * c.Z(1, -1), zero}));
  auto& c2 = trig_context(2, 4);
  EXPECT_TRUE(is_admissible(random_class(c2, 5)));
}

TEST(KTheory, PiMaps) {
  auto& c = trig_context(1, 2);
  Poly zero(c.ring());
  KTheoryClass y(c, {c.one() - c.Z(2) * c.Z(1, -1), zero});
  EXPECT_EQ(pi_zero(c, trig_weight_zero(c)), y);
  EXPECT_EQ(pi_inf(c, trig_weight_inf(c)), y);
  for (int n = 1; n <= 4; ++n) {
    auto& cn = trig_context(1, n);
    EXPECT_EQ(pi_zero(cn, cn.one()), KTheoryClass::unit(cn));
  }
  EXPECT_THROW(pi_zero(c, c.T(1)), NotInP);
}

TEST(KTheory, TauUnit) {
  auto& c = trig_context(1, 2);
  EXPECT_EQ(tau_apply(KTheoryClass::unit(c)), KTheoryClass::unit(c));
  auto g = restrict_class(c, c.T(1));
  EXPECT_EQ(tau_inv_apply(tau_apply(g)), g);
  EXPECT_EQ(tau_apply(tau_inv_apply(g)), g);
}

TEST(KTheory, TauSinglePoint) {
  for (int n = 1; n <= 3; ++n) {
    auto& c = trig_context(n, n);
    FixedPointIndex I(n, n, identity_permutation(n));
    // one fixed point, R = 1: tau multiplies by W0(H Z; Z)/E(Z)
    Poly w = eval_at_fixed_point(c, trig_weight_zero(c), I, true);
    Poly ev = exact_div(w, e_at(c, I));
    auto x = KTheoryClass::constant(c, c.Z(1) + c.H());
    EXPECT_EQ(tau_apply(x)[0], ev * x[0]);
    EXPECT_EQ(tau_inv_apply(tau_apply(x)), x);
    EXPECT_EQ(ev, c.H(static_cast<int>(tau_det_exponent(n, n))));
  }
}

TEST(KTheory, TauDetExamples) {
  EXPECT_EQ(tau_det(trig_context(1, 2)), RatFun(trig_context(1, 2).H(-1)));
  EXPECT_EQ(tau_det(trig_context(1, 1)), RatFun(trig_context(1, 1).one()));
  EXPECT_EQ(tau_det(trig_context(2, 3)), RatFun(trig_context(2, 3).H(-6)));
}

TEST(KTheory, TauDetAll) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    EXPECT_EQ(tau_det(c), RatFun(c.H(static_cast<int>(tau_det_exponent(k, n))))) << k << "," << n;
  }
}

TEST(KTheory, TauDetFiveSpecialized) {
  std::vector<mpq_class> z{mpq_class(2), mpq_class(-3, 2), mpq_class(5, 3), mpq_class(7), mpq_class(-1, 4)};
  for (int k = 1; k <= 3; ++k) {
    auto& c = trig_context(k, 5);
    long e = tau_det_exponent(k, 5);
    EXPECT_EQ(tau_det_specialized(c, z, false), c.H(static_cast<int>(e))) << k;
    EXPECT_EQ(tau_det_specialized(c, z, true), c.H(static_cast<int>(-e))) << k;
  }
}

TEST(KTheory, SizeGuard) { EXPECT_THROW(trig_weight_reduced(trig_context(5, 5)), SizeLimit); }

TEST(KTheory, Orthogonality) {
  for (auto [k, n] : small_cases(4)) {
    auto r = orthogonality_check(trig_context(k, n));
    EXPECT_TRUE(r.pass) << k << "," << n << ": " << r.detail;
  }
}

TEST(KTheory, WeightDeterminants) {
  for (auto [k, n] : small_cases(4)) {
    auto r = weight_det_check(trig_context(k, n), n <= 3);
    EXPECT_TRUE(r.pass) << k << "," << n << ": " << r.detail;
  }
}

TEST(KTheory, DFactorsSmall) {
  auto& c = trig_context(1, 2);
  // D(Z) D(Z^-1) = (1 - Z2/Z1)(1 - Z1/Z2), D~ = 1
  EXPECT_EQ(d_product(c), (c.one() - c.Z(2) * c.Z(1, -1)) * (c.one() - c.Z(1) * c.Z(2, -1)));
  EXPECT_EQ(d_tilde(c), c.one());
  auto& c22 = trig_context(2, 2);
  EXPECT_EQ(d_tilde(c22), e_at(c22, FixedPointIndex(2, 2, {1, 2})));
}

TEST(KTheory, WeightOfClass) {
  auto& c = trig_context(1, 2);
  EXPECT_EQ(weight_of_class(KTheoryClass::unit(c), false), c.one());
  auto g = restrict_class(c, c.T(1));
  Poly w = weight_of_class(g, false);
  EXPECT_EQ(w, c.Z(1) + c.Z(2) - c.Z(1) * c.Z(2) * c.T(1, -1));
  EXPECT_EQ(eval_at_fixed_point(c, w, FixedPointIndex(1, 2, {1}), false), c.Z(1));
  for (int n = 1; n <= 3; ++n) {
    auto& cn = trig_context(n, n);
    auto x = KTheoryClass::constant(cn, cn.Z(1) - cn.H());
    EXPECT_EQ(weight_of_class(x, false), trig_weight_reduced(cn) * x[0]);
  }
}

TEST(KTheory, RandomClassesRoundTrip) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    for (std::uint64_t s = 1; s <= 2; ++s) {
      auto x = random_class(c, 100 * n + 10 * k + s);
      ASSERT_TRUE(is_admissible(x));
      auto tx = tau_apply(x), ti = tau_inv_apply(x);
      EXPECT_TRUE(is_admissible(tx));
      EXPECT_TRUE(is_admissible(ti));
      EXPECT_EQ(tau_inv_apply(tx), x) << k << "," << n;
      auto w0 = weight_of_class(x, false), wi = weight_of_class(x, true);
      EXPECT_TRUE(membership_P(c, w0));
      EXPECT_TRUE(membership_P(c, wi));
      EXPECT_EQ(pi_zero(c, w0), x) << k << "," << n;
      EXPECT_EQ(pi_inf(c, wi), x) << k << "," << n;
    }
  }
}
