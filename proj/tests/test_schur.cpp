#include <gtest/gtest.h>

#include "kmono/schur.hpp"

using namespace kmono;

namespace {

std::vector<std::pair<int, int>> small_cases(int nmax) {
  std::vector<std::pair<int, int>> v;
  for (int n = 1; n <= nmax; ++n)
    for (int k = 1; k <= n; ++k) v.push_back({k, n});
  return v;
}

Poly x(int n, int a, int e = 1) { return Poly::var(x_ring(n), a - 1, e); }

}  // namespace

TEST(Schur, AlternantRatio) {
  EXPECT_EQ(schur_V(FixedPointIndex(2, 4, {1, 2})), Poly(x_ring(4), 1));
  EXPECT_EQ(schur_V(FixedPointIndex(1, 3, {2})), x(3, 1));
  EXPECT_EQ(schur_V(FixedPointIndex(2, 3, {1, 3})), x(3, 1) + x(3, 2));
  // complete homogeneous h_2 for a single row of length 2
  EXPECT_EQ(schur_V(FixedPointIndex(2, 4, {1, 4})), x(4, 1, 2) + x(4, 1) * x(4, 2) + x(4, 2, 2));
  // e_2 in three variables
  EXPECT_EQ(schur_V(FixedPointIndex(3, 4, {1, 3, 4})), x(4, 1) * x(4, 2) + x(4, 1) * x(4, 3) + x(4, 2) * x(4, 3));
}

TEST(Schur, HomogeneousSymmetric) {
  for (auto [k, n] : small_cases(5))
    for (auto& I : subsets(k, n)) {
      Poly v = schur_V(I);
      ASSERT_TRUE(v.is_polynomial());
      for (auto& t : v.terms()) EXPECT_EQ(t.m.deg, I.ell());
      std::vector<std::string> names;
      for (int a = 1; a <= k; ++a) names.push_back("x" + std::to_string(a));
      EXPECT_TRUE(is_symmetric_in(v, names));
    }
}

TEST(Schur, BasisDeterminantExamples) {
  EXPECT_EQ(schur_basis_det(1, 2), x(2, 2) - x(2, 1));
  EXPECT_EQ(schur_basis_det(3, 3), Poly(x_ring(3), 1));
  EXPECT_EQ(schur_basis_det(1, 3), (x(3, 2) - x(3, 1)) * (x(3, 3) - x(3, 1)) * (x(3, 3) - x(3, 2)));
}

TEST(Schur, BasisDeterminant) {
  for (auto [k, n] : small_cases(5)) {
    if (binomial(n, k) > 6) continue;
    EXPECT_EQ(schur_basis_det(k, n), schur_basis_det_closed_form(k, n)) << k << "," << n;
  }
  EXPECT_EQ(schur_basis_det(1, 6), schur_basis_det_closed_form(1, 6));
  EXPECT_EQ(schur_basis_det(5, 6), schur_basis_det_closed_form(5, 6));
}

TEST(Schur, BasisDeterminantSpecialized) {
  const RingPtr& r = x_ring(5);
  std::vector<std::vector<mpq_class>> pts{{mpq_class(3), mpq_class(-2, 5), mpq_class(7, 3), mpq_class(11)},
                                         {mpq_class(-4), mpq_class(1, 2), mpq_class(9), mpq_class(-13, 7)}};
  for (auto& v : pts) {
    MonomialMap sp(r, r);
    for (int a = 1; a < 5; ++a) sp.set(r->name(a - 1), v[a - 1], Monomial{});
    for (int k = 2; k <= 3; ++k)
      EXPECT_EQ(schur_basis_det_specialized(k, 5, v), substitute(schur_basis_det_closed_form(k, 5), sp)) << k;
  }
}

TEST(Schur, Laplace) {
  for (auto [k, n] : small_cases(5)) {
    auto r = laplace_checks(k, n);
    EXPECT_TRUE(r.pass) << k << "," << n << ": " << r.detail;
  }
}

TEST(Schur, LaplaceSmallByHand) {
  // k=1, n=2, second identity with J=K={1}: x2/(x2-x1) + x1/(x1-x2) = 1
  Poly a = x(2, 2), b = x(2, 1), d = x(2, 2) - x(2, 1);
  EXPECT_EQ(exact_div(a - b, d), Poly(x_ring(2), 1));
  EXPECT_EQ(schur_V(FixedPointIndex(1, 2, {1})) * schur_V_at(FixedPointIndex(1, 2, {2}), x_ring(2), {1}) -
                schur_V_at(FixedPointIndex(1, 2, {2}), x_ring(2), {0}),
            d);
}

TEST(Schur, Expand) {
  auto& c = trig_context(1, 2);
  auto g = restrict_class(c, c.T(1));
  auto e = expand_in_schur(g);
  EXPECT_TRUE(e[0].is_zero());
  EXPECT_EQ(e[1], c.one());
  auto g2 = restrict_class(c, c.T(1, 2));
  auto e2 = expand_in_schur(g2);
  EXPECT_EQ(e2[0], -c.Z(1) * c.Z(2));
  EXPECT_EQ(e2[1], c.Z(1) + c.Z(2));
  for (auto [k, n] : small_cases(4)) {
    auto& cc = trig_context(k, n);
    auto I = subsets(k, n);
    for (std::size_t j = 0; j < I.size(); ++j) {
      auto v = expand_in_schur(schur_class(cc, I[j]));
      for (std::size_t i = 0; i < I.size(); ++i) EXPECT_EQ(v[i], Poly(cc.ring(), i == j ? 1 : 0));
    }
  }
}

TEST(Schur, ExpandRoundTrip) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    for (std::uint64_t s = 1; s <= 3; ++s) {
      auto x = random_class(c, 7 * s + n);
      EXPECT_EQ(from_schur(c, expand_in_schur(x)), x) << k << "," << n;
    }
  }
}

TEST(Schur, Matrices) {
  auto& c = trig_context(1, 2);
  auto M = m_matrix(c);
  PolyMatrix want{{Poly(c.ring()), c.one()}, {-c.Z(1) * c.Z(2), c.Z(1) + c.Z(2)}};
  EXPECT_EQ(M, want);
  for (int n = 1; n <= 3; ++n) {
    auto& cn = trig_context(n, n);
    Poly prod = cn.one();
    for (int a = 1; a <= n; ++a) prod *= cn.Z(a);
    EXPECT_EQ(m_matrix(cn), PolyMatrix{{prod}});
    auto T = t_matrix(cn);
    EXPECT_EQ(T, PolyMatrix{{cn.H(static_cast<int>(tau_det_exponent(n, n)))}});
    EXPECT_EQ(matmul(T, t_inv_matrix(cn)), identity_matrix(cn.ring(), 1));
    auto mm = monodromy_matrices(cn);
    EXPECT_EQ(mm.inf_on_zero, mm.M);
    EXPECT_EQ(mm.zero_on_inf, mm.M);
  }
}

TEST(Schur, IntegralityAndInverse) {
  for (auto [k, n] : small_cases(4)) {
    auto& c = trig_context(k, n);
    PolyMatrix M, T, Ti;
    ASSERT_NO_THROW(M = m_matrix(c));
    ASSERT_NO_THROW(T = t_matrix(c));
    ASSERT_NO_THROW(Ti = t_inv_matrix(c));
    EXPECT_EQ(matmul(T, Ti), identity_matrix(c.ring(), T.size())) << k << "," << n;
    EXPECT_EQ(matmul(Ti, T), identity_matrix(c.ring(), T.size())) << k << "," << n;
  }
}

TEST(Schur, MonodromyInvariants) {
  auto& c = trig_context(1, 2);
  auto mm = monodromy_matrices(c);
  EXPECT_EQ(trace(mm.inf_on_zero), c.Z(1) + c.Z(2));
  EXPECT_EQ(det(mm.inf_on_zero), c.Z(1) * c.Z(2));
  EXPECT_EQ(mm.scalar, c.H());
  // det(L - M) for the explicit 2x2 M
  EXPECT_EQ(char_poly(c, mm.M), c.L() * c.L() - (c.Z(1) + c.Z(2)) * c.L() + c.Z(1) * c.Z(2));
  for (auto [k, n] : small_cases(4)) {
    auto& cc = trig_context(k, n);
    auto r = charpoly_invariance(cc, monodromy_matrices(cc));
    EXPECT_TRUE(r.pass) << k << "," << n << ": " << r.detail;
  }
}
