#include <gtest/gtest.h>

#include <algorithm>

#include "kmono/weights.hpp"

using namespace kmono;

namespace {

std::vector<std::vector<int>> all_perms(int n) {
  std::vector<int> p = identity_permutation(n);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<std::pair<int, int>> small_cases(int nmax) {
  std::vector<std::pair<int, int>> v;
  for (int n = 1; n <= nmax; ++n)
    for (int k = 1; k <= n; ++k) v.push_back({k, n});
  return v;
}

Poly swap_z(const TrigContext& c, const Poly& p, int a, int b) {
  auto s = identity_permutation(c.n());
  std::swap(s[a - 1], s[b - 1]);
  return substitute(p, c.z_permutation(s));
}

}  // namespace

TEST(Weights, UFactor) {
  auto& c1 = trig_context(1, 3);
  EXPECT_EQ(u_factor(c1), RatFun(c1.one()));
  auto& c11 = trig_context(1, 1);
  EXPECT_EQ(u_factor(c11), RatFun(c11.one()));
  auto& c = trig_context(2, 2);
  Poly one = c.one();
  Poly num = (one - c.Z(2) * c.T(1, -1)) * (one - c.H() * c.Z(1) * c.T(2, -1)) * (one - c.H() * c.T(2) * c.T(1, -1));
  EXPECT_EQ(u_factor(c), RatFun(num, one - c.T(2) * c.T(1, -1)));
}

TEST(Weights, Reduced) {
  EXPECT_EQ(trig_weight_reduced(trig_context(1, 1)), trig_context(1, 1).one());
  EXPECT_EQ(trig_weight_reduced(trig_context(1, 2)), trig_context(1, 2).one());
  auto& c = trig_context(2, 2);
  Poly w = trig_weight_reduced(c);
  EXPECT_FALSE(w.is_zero());
  for (auto& t : w.terms())
    for (int i = 1; i <= 2; ++i) EXPECT_LE(t.m[c.iT(i)], 0);
  // oracle: two-term symmetrization written out, numerator cleared by T1 - T2
  Poly T1 = c.T(1), T2 = c.T(2), H = c.H(), Z1 = c.Z(1), Z2 = c.Z(2), one = c.one();
  // U(T1,T2) = (1-Z2/T1)(1-H Z1/T2)(T1 - H T2)/(T1 - T2)
  Poly a = (T1 - Z2) * (T2 - H * Z1) * (T1 - H * T2);
  Poly b = (T2 - Z2) * (T1 - H * Z1) * (T2 - H * T1);
  Poly lhs = w * T1 * T2 * (T1 - T2);
  EXPECT_EQ(lhs, a - b);
}

TEST(Weights, ZeroAndInfinity) {
  auto& c = trig_context(1, 2);
  EXPECT_EQ(trig_weight_zero(c), c.one() - c.Z(2) * c.T(1, -1));
  EXPECT_EQ(trig_weight_inf(c), c.one() - c.H() * c.Z(2) * c.T(1, -1));
  auto& c3 = trig_context(1, 3);
  EXPECT_EQ(trig_weight_zero(c3), (c3.one() - c3.Z(2) * c3.T(1, -1)) * (c3.one() - c3.Z(3) * c3.T(1, -1)));
  for (int k = 1; k <= 3; ++k) {
    auto& cc = trig_context(k, k);
    EXPECT_EQ(trig_weight_zero(cc), trig_weight_reduced(cc));
    EXPECT_EQ(trig_weight_inf(cc), cc.H(k * (k - 1) / 2) * trig_weight_reduced(cc));
  }
}

TEST(Weights, EAndR) {
  auto& c1 = trig_context(1, 2);
  EXPECT_EQ(e_poly(c1), c1.one());
  EXPECT_EQ(r_mult(c1), c1.one() - c1.Z(2) * c1.Z(1, -1));
  auto& c = trig_context(2, 3);
  EXPECT_EQ(e_poly(c), (c.one() - c.H() * c.T(1) * c.T(2, -1)) * (c.one() - c.H() * c.T(2) * c.T(1, -1)));
}

TEST(Weights, EvalAtFixedPoint) {
  auto& c = trig_context(1, 2);
  auto w0 = trig_weight_zero(c);
  FixedPointIndex I1(1, 2, {1}), I2(1, 2, {2});
  EXPECT_EQ(eval_at_fixed_point(c, w0, I1, false), c.one() - c.Z(2) * c.Z(1, -1));
  EXPECT_TRUE(eval_at_fixed_point(c, w0, I2, false).is_zero());
  auto wi = trig_weight_inf(c, I2.sigma());
  EXPECT_EQ(eval_at_fixed_point(c, wi, I2, true), c.one() - c.Z(1) * c.Z(2, -1));
}

TEST(Weights, Membership) {
  auto& c = trig_context(1, 2);
  EXPECT_TRUE(membership_P(c, c.one()));
  EXPECT_FALSE(membership_P(c, c.T(1)));
  EXPECT_TRUE(membership_P(c, trig_weight_zero(c)));
  auto& c2 = trig_context(2, 3);
  EXPECT_FALSE(membership_P(c2, c2.T(1, -1)));  // not symmetric
  EXPECT_FALSE(membership_P(c2, c2.T(1, -1) * c2.T(2, -1)));  // no vanishing
  EXPECT_FALSE(membership_P(c2, c2.T(1, -3)));
}

TEST(Weights, ZSymmetry) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    std::vector<Poly> ws{trig_weight_reduced(c), trig_weight_zero(c), trig_weight_inf(c)};
    for (auto& w : ws) {
      for (int a = 1; a < k; ++a) EXPECT_EQ(swap_z(c, w, a, a + 1), w) << k << "," << n;
      for (int a = k + 1; a < n; ++a) EXPECT_EQ(swap_z(c, w, a, a + 1), w) << k << "," << n;
    }
  }
}

TEST(Weights, MembershipAllPermutations) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    for (auto& s : all_perms(n)) {
      EXPECT_TRUE(membership_P(c, trig_weight_zero(c, s))) << k << "," << n;
      EXPECT_TRUE(membership_P(c, trig_weight_inf(c, s))) << k << "," << n;
    }
  }
}

TEST(Weights, TriangularEvaluation) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    for (auto& J : subsets(k, n)) {
      auto s = J.sigma();
      Poly rhs = e_at(c, J) * r_mult(c, s);
      for (auto& I : subsets(k, n)) {
        Poly a = eval_at_fixed_point(c, trig_weight_zero(c, s), I, false);
        Poly b = eval_at_fixed_point(c, trig_weight_inf(c, s), I, true);
        if (I == J) {
          EXPECT_EQ(a, rhs);
          EXPECT_EQ(b, rhs);
        } else {
          EXPECT_TRUE(a.is_zero());
          EXPECT_TRUE(b.is_zero());
        }
      }
    }
  }
}

TEST(Weights, Cohomological) {
  CohContext c1(1, 3);
  EXPECT_EQ(coh_weight(c1), (c1.t(1) - c1.gb(1)) * (c1.t(1) - c1.gb(2)));
  EXPECT_EQ(q_class(c1), (c1.g(1) - c1.gb(1) - c1.h()) * (c1.g(1) - c1.gb(2) - c1.h()));
  CohContext c0(1, 1);
  EXPECT_EQ(coh_weight(c0), c0.one());
  EXPECT_EQ(q_class(c0), c0.one());
  CohContext c(2, 2);
  // (t1-g2)(t1-t2-h)(t2-g1-h)/(t1-t2) + (t2-g2)(t2-t1-h)(t1-g1-h)/(t2-t1), numerator by hand
  auto t1 = c.t(1), t2 = c.t(2), g1 = c.g(1), g2 = c.g(2), h = c.h();
  Poly num = (t1 - g2) * (t1 - t2 - h) * (t2 - g1 - h) - (t2 - g2) * (t2 - t1 - h) * (t1 - g1 - h);
  EXPECT_EQ(coh_weight(c) * (t1 - t2), num);
  CohContext c12(1, 2);
  EXPECT_EQ(coh_restrict(c12, q_class(c12), FixedPointIndex(1, 2, {1})), c12.z(1) - c12.z(2) - c12.h());
}

TEST(Weights, CohGammaSymmetry) {
  for (auto [k, n] : small_cases(4)) {
    CohContext c(k, n);
    EXPECT_TRUE(is_symmetric_in(coh_weight(c), c.g_names())) << k << "," << n;
    EXPECT_TRUE(is_symmetric_in(coh_weight(c), c.t_names())) << k << "," << n;
  }
}

TEST(Weights, CohVanishing) {
  for (auto [k, n] : small_cases(3)) {
    if (k < 2) continue;
    CohContext c(k, n);
    Poly w = coh_weight(c);
    for (auto& J : subsets(k, n)) {
      Poly r = coh_restrict(c, w, J);
      for (int a = 1; a <= n; ++a)
        for (int i = 1; i <= k; ++i)
          for (int j = 1; j <= k; ++j) {
            if (i == j) continue;
            std::vector<std::optional<Poly>> img(c.ring()->size());
            for (std::size_t v = 0; v < img.size(); ++v) img[v] = Poly::var(c.ring(), v);
            img[c.it(i)] = c.z(a);
            img[c.it(j)] = c.z(a) + c.h();
            EXPECT_TRUE(substitute(r, c.ring(), img).is_zero()) << J.to_json() << " a=" << a;
          }
    }
  }
}
