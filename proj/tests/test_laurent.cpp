#include <gtest/gtest.h>

#include <random>

#include "kmono/laurent.hpp"

using namespace kmono;

namespace {

struct Vars {
  RingPtr r = make_ring({"Z1", "Z2", "Z3", "H", "T1", "T2"});
  Poly v(const char* n, int e = 1) const { return Poly::var(r, n, e); }
  Poly c(long x) const { return Poly(r, x); }
};

Poly random_poly(const RingPtr& r, std::mt19937& g, int terms, int lo, int hi, std::size_t nv) {
  std::uniform_int_distribution<int> ed(lo, hi), cd(-5, 5);
  std::vector<Term> t;
  for (int i = 0; i < terms; ++i) {
    Monomial m;
    for (std::size_t v = 0; v < nv; ++v) m.set(v, ed(g));
    t.push_back({m, mpq_class(cd(g), 1 + std::abs(cd(g)))});
  }
  return Poly::from_terms(r, t);
}

}  // namespace

TEST(Laurent, Add) {
  Vars V;
  auto p = V.v("Z1") * V.v("H") - V.c(3);
  EXPECT_EQ(Poly(V.r) + p, p);
  EXPECT_TRUE(((V.v("Z1") - V.v("Z2")) + (V.v("Z2") - V.v("Z1"))).is_zero());
  auto ratio = V.v("Z2") * V.v("Z1", -1);
  EXPECT_EQ((V.c(1) - ratio) + ratio, V.c(1));
}

TEST(Laurent, MulETwo) {
  Vars V;
  auto H = V.v("H"), T1 = V.v("T1"), T2 = V.v("T2");
  auto lhs = (V.c(1) - H * T2 * V.v("T1", -1)) * (V.c(1) - H * T1 * V.v("T2", -1));
  auto rhs = V.c(1) + H * H - H * T2 * V.v("T1", -1) - H * T1 * V.v("T2", -1);
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(V.c(1) * rhs, rhs);
  EXPECT_EQ(V.v("Z1", -1) * V.v("Z1"), V.c(1));
}

TEST(Laurent, ExactDiv) {
  Vars V;
  auto Z1 = V.v("Z1"), Z2 = V.v("Z2");
  EXPECT_EQ(exact_div(Z1 * Z1 - Z2 * Z2, Z1 - Z2), Z1 + Z2);
  EXPECT_EQ(exact_div(V.c(1) - Z2 * V.v("Z1", -1), Z1 - Z2), V.v("Z1", -1));
  EXPECT_THROW(exact_div(V.c(1), Z1 - Z2), NotDivisible);
  try {
    exact_div(Z1 * Z1 + V.c(1), Z1 - Z2);
    FAIL();
  } catch (const NotDivisible& e) {
    EXPECT_FALSE(e.remainder.empty());
  }
}

TEST(Laurent, Substitute) {
  Vars V;
  auto Z1 = V.v("Z1"), Z2 = V.v("Z2"), H = V.v("H");
  auto f = V.c(1) - Z2 * V.v("T1", -1);
  MonomialMap m1(V.r, V.r);
  m1.set("T1", Z1);
  EXPECT_EQ(substitute(f, m1), V.c(1) - Z2 * V.v("Z1", -1));
  MonomialMap m2(V.r, V.r);
  m2.set("T1", H * Z1);
  EXPECT_EQ(substitute(f, m2), V.c(1) - Z2 * V.v("Z1", -1) * V.v("H", -1));
  EXPECT_EQ(substitute(f, MonomialMap(V.r, V.r)), f);
  MonomialMap z(V.r, V.r);
  z.set("T1", 0, Monomial{});
  EXPECT_THROW(substitute(f, z), ZeroImage);
}

TEST(Laurent, Symmetrize) {
  Vars V;
  RatFun f(V.v("T1") * V.v("H") + V.c(2));
  EXPECT_EQ(symmetrize(f, {"T1"}), f);
  EXPECT_EQ(symmetrize(RatFun(V.v("T1")), {"T1", "T2"}), RatFun(V.v("T1") + V.v("T2")));
  // additive variables: (t1 - t2 - h)/(t1 - t2)
  auto t1 = V.v("T1"), t2 = V.v("T2"), h = V.v("H");
  auto s = symmetrize(RatFun(t1 - t2 - h, t1 - t2), {"T1", "T2"});
  EXPECT_FALSE(s.has_denominator());
  EXPECT_EQ(s.numerator(), V.c(2));
  std::vector<std::string> seven{"Z1", "Z2", "Z3", "H", "T1", "T2", "Z1"};
  EXPECT_THROW(symmetrize(f, seven), TooManyVariables);
}

TEST(Laurent, SymmetrizeProjector) {
  Vars V;
  std::mt19937 g(7);
  for (int it = 0; it < 5; ++it) {
    auto p = random_poly(V.r, g, 4, -1, 2, 6);
    RatFun f(p, V.v("T1") - V.v("T2") * V.v("H"));
    auto s = symmetrize(f, {"T1", "T2"});
    auto ss = symmetrize(s, {"T1", "T2"});
    EXPECT_EQ(ss, s * RatFun(V.c(2)));
  }
}

TEST(Laurent, Determinant) {
  Vars V;
  auto Z1 = V.v("Z1"), Z2 = V.v("Z2");
  EXPECT_EQ(det(std::vector<std::vector<Poly>>{{V.c(1)}}), V.c(1));
  EXPECT_EQ(det(std::vector<std::vector<Poly>>{{V.c(1), V.c(1)}, {Z1, Z2}}), Z2 - Z1);
  EXPECT_TRUE(det(std::vector<std::vector<Poly>>{{Z1, Z2, V.c(3)}, {V.c(1), Z1, Z2}, {Z1, Z2, V.c(3)}}).is_zero());
}

TEST(Laurent, DeterminantMatchesCofactor) {
  Vars V;
  std::mt19937 g(11);
  for (int it = 0; it < 6; ++it) {
    std::vector<std::vector<RatFun>> m(3);
    std::vector<std::vector<Poly>> num(3), den(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        num[i].push_back(random_poly(V.r, g, 3, -1, 1, 3));
        den[i].push_back((i + j) % 2 ? V.c(1) : V.v("Z1") - V.v("Z2") * V.c(i + 1));
        m[i].push_back(RatFun(num[i][j], den[i][j]));
      }
    auto e = [&](int i, int j) { return m[i][j]; };
    RatFun ref = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                 e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    EXPECT_EQ(det(m), ref);
  }
}

TEST(Laurent, Evaluate) {
  Vars V;
  std::vector<std::complex<double>> x(6, 1.0);
  x[0] = 2;
  x[1] = 1;
  EXPECT_NEAR(std::abs(evaluate_complex(V.c(1) - V.v("Z2") * V.v("Z1", -1), x) - 0.5), 0, 1e-15);
  x[3] = std::polar(1.0, 2 * M_PI * 0.25);
  EXPECT_NEAR(std::abs(evaluate_complex(V.v("H"), x) - std::complex<double>(0, 1)), 0, 1e-15);
  EXPECT_EQ(evaluate_complex(Poly(V.r), x), std::complex<double>(0));
  x[0] = 0;
  EXPECT_THROW(evaluate_complex(V.v("Z1", -1), x), ZeroImage);
}

TEST(Laurent, Serialization) {
  Vars V;
  auto p = V.v("Z1", 2) * V.v("H", -1) * mpq_class(3, 2) - V.v("Z2") + V.c(4);
  EXPECT_EQ(p.to_string(), "3/2 * Z1^2 * H^-1 + -1 * Z2 + 4");
  EXPECT_EQ(Poly(V.r).to_string(), "0");
  auto q = V.c(4) + V.v("Z1", 2) * V.v("H", -1) * mpq_class(3, 2) - V.v("Z2");
  EXPECT_EQ(p.to_string(), q.to_string());
}

TEST(Laurent, RingAxiomsRandomized) {
  Vars V;
  std::mt19937 g(3);
  MonomialMap m(V.r, V.r);
  m.set("Z1", mpq_class(-2, 3), (V.v("H") * V.v("Z2", -1)).leading().m);
  for (int it = 0; it < 25; ++it) {
    auto a = random_poly(V.r, g, 5, -2, 2, 4);
    auto b = random_poly(V.r, g, 4, -2, 2, 4);
    auto c = random_poly(V.r, g, 3, -2, 2, 4);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    if (!b.is_zero()) {
      EXPECT_EQ(exact_div(a * b, b), a);
    }
    EXPECT_EQ(substitute(a * b, m), substitute(a, m) * substitute(b, m));
    EXPECT_EQ(substitute(a + b, m), substitute(a, m) + substitute(b, m));
  }
}
