#pragma once

// Localized equivariant K-theory of T*Gr(k,n): classes as tuples of
// fixed-point restrictions, the maps pi^0 / pi^inf, and the transition map.

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "weights.hpp"

namespace kmono {

class KTheoryClass {
 public:
  KTheoryClass(const TrigContext& c, std::vector<Poly> restrictions) : c_(&c), r_(std::move(restrictions)) {
    if (static_cast<long>(r_.size()) != binomial(c.n(), c.k())) throw DomainError("wrong number of restrictions");
  }
  static KTheoryClass constant(const TrigContext& c, const Poly& v) {
    return KTheoryClass(c, std::vector<Poly>(binomial(c.n(), c.k()), v));
  }
  static KTheoryClass unit(const TrigContext& c) { return constant(c, c.one()); }
  static KTheoryClass zero(const TrigContext& c) { return constant(c, Poly(c.ring())); }

  const TrigContext& context() const { return *c_; }
  int k() const { return c_->k(); }
  int n() const { return c_->n(); }
  std::size_t size() const { return r_.size(); }
  const Poly& operator[](std::size_t i) const { return r_[i]; }
  const Poly& at(const FixedPointIndex& I) const { return r_[subset_rank(I)]; }
  const std::vector<Poly>& restrictions() const { return r_; }

  friend KTheoryClass operator+(const KTheoryClass& a, const KTheoryClass& b) {
    std::vector<Poly> r;
    for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a.r_[i] + b.r_[i]);
    return KTheoryClass(*a.c_, r);
  }
  friend KTheoryClass operator-(const KTheoryClass& a, const KTheoryClass& b) {
    std::vector<Poly> r;
    for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a.r_[i] - b.r_[i]);
    return KTheoryClass(*a.c_, r);
  }
  friend KTheoryClass operator*(const KTheoryClass& a, const KTheoryClass& b) {
    std::vector<Poly> r;
    for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a.r_[i] * b.r_[i]);
    return KTheoryClass(*a.c_, r);
  }
  friend KTheoryClass operator*(const Poly& s, const KTheoryClass& a) {
    std::vector<Poly> r;
    for (auto& x : a.r_) r.push_back(s * x);
    return KTheoryClass(*a.c_, r);
  }
  friend bool operator==(const KTheoryClass& a, const KTheoryClass& b) { return a.r_ == b.r_; }

  // multiplication by the class of Gamma_1 ... Gamma_k
  KTheoryClass times_det() const {
    auto I = subsets(k(), n());
    std::vector<Poly> r;
    for (std::size_t i = 0; i < size(); ++i) {
      Poly m = r_[i];
      for (int a : I[i].elements()) m *= c_->Z(a);
      r.push_back(m);
    }
    return KTheoryClass(*c_, r);
  }

 private:
  const TrigContext* c_;
  std::vector<Poly> r_;
};

inline bool is_admissible(const TrigContext& c, const std::vector<Poly>& r) {
  auto I = subsets(c.k(), c.n());
  if (r.size() != I.size()) return false;
  for (std::size_t x = 0; x < I.size(); ++x)
    for (int i = 1; i <= c.n(); ++i)
      for (int j = i + 1; j <= c.n(); ++j) {
        if (I[x].contains(i) == I[x].contains(j)) continue;
        std::vector<int> s;
        for (int a : I[x].elements()) s.push_back(a == i ? j : a == j ? i : a);
        std::sort(s.begin(), s.end());
        std::size_t y = subset_rank(FixedPointIndex(c.k(), c.n(), s));
        if (y < x) continue;
        if (!try_exact_div(r[x] - r[y], c.Z(i) - c.Z(j))) return false;
      }
  return true;
}
inline bool is_admissible(const KTheoryClass& x) { return is_admissible(x.context(), x.restrictions()); }

// Gamma -> Z_I (T variables), Gamma-bar -> Z_{complement} (Tb variables)
inline KTheoryClass restrict_class(const TrigContext& c, const Poly& p) {
  if (!is_symmetric_in(p, c.t_names()) || !is_symmetric_in(p, c.tb_names()))
    throw NotSymmetric("input is not symmetric in the Chern roots");
  std::vector<Poly> r;
  for (auto& I : subsets(c.k(), c.n())) r.push_back(eval_at_fixed_point(c, p, I, false));
  return KTheoryClass(c, r);
}

inline KTheoryClass pi_class(const TrigContext& c, const Poly& p, bool inf) {
  if (!membership_P(c, p)) throw NotInP("argument is not in P");
  std::vector<Poly> r;
  for (auto& I : subsets(c.k(), c.n())) r.push_back(exact_div(eval_at_fixed_point(c, p, I, inf), e_at(c, I)));
  return KTheoryClass(c, r);
}
inline KTheoryClass pi_zero(const TrigContext& c, const Poly& p) { return pi_class(c, p, false); }
inline KTheoryClass pi_inf(const TrigContext& c, const Poly& p) { return pi_class(c, p, true); }

// prod_{a<b} (Z_a - Z_b)
inline Poly vandermonde(const TrigContext& c) {
  Poly v = c.one();
  for (int a = 1; a <= c.n(); ++a)
    for (int b = a + 1; b <= c.n(); ++b) v *= c.Z(a) - c.Z(b);
  return v;
}

// Everything the localized transition-map formulas need, per (k,n).
struct TauData {
  std::vector<FixedPointIndex> I;
  std::vector<Poly> R;            // R(Z_{sigma_J})
  std::vector<Poly> VR;           // vandermonde / R_J
  Poly V;
  std::vector<Poly> E;            // E(Z_I)
  std::vector<std::vector<Poly>> A;  // W0(H Z_I; Z_sigma_J) / E(Z_I)
  std::vector<std::vector<Poly>> B;  // Winf(Z_I; Z_sigma_J) / E(Z_I)
};

namespace detail {
inline std::mutex& tau_mutex() {
  static std::mutex m;
  return m;
}
inline std::map<std::pair<int, int>, std::shared_ptr<const TauData>>& tau_cache() {
  static std::map<std::pair<int, int>, std::shared_ptr<const TauData>> m;
  return m;
}
}  // namespace detail

inline const TauData& tau_data(const TrigContext& c) {
  {
    std::lock_guard lk(detail::tau_mutex());
    auto it = detail::tau_cache().find({c.k(), c.n()});
    if (it != detail::tau_cache().end()) return *it->second;
  }
  auto d = std::make_shared<TauData>();
  d->I = subsets(c.k(), c.n());
  d->V = vandermonde(c);
  for (auto& J : d->I) {
    d->R.push_back(r_mult(c, J.sigma()));
    d->VR.push_back(exact_div(d->V, d->R.back()));
    d->E.push_back(e_at(c, J));
  }
  std::size_t m = d->I.size();
  d->A.assign(m, {});
  d->B.assign(m, {});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      auto s = d->I[j].sigma();
      d->A[i].push_back(exact_div(eval_at_fixed_point(c, trig_weight_zero(c, s), d->I[i], true), d->E[i]));
      d->B[i].push_back(exact_div(eval_at_fixed_point(c, trig_weight_inf(c, s), d->I[i], false), d->E[i]));
    }
  std::lock_guard lk(detail::tau_mutex());
  auto& slot = detail::tau_cache()[{c.k(), c.n()}];
  if (!slot) slot = d;
  return *slot;
}

// sum_J M_IJ X_J / R_J, exact
inline KTheoryClass apply_localized(const TrigContext& c, const std::vector<std::vector<Poly>>& M,
                                    const KTheoryClass& x) {
  const TauData& d = tau_data(c);
  std::vector<Poly> out;
  for (std::size_t i = 0; i < d.I.size(); ++i) {
    Poly s(c.ring());
    for (std::size_t j = 0; j < d.I.size(); ++j)
      if (!x[j].is_zero()) s += M[i][j] * x[j] * d.VR[j];
    out.push_back(exact_div(s, d.V));
  }
  return KTheoryClass(c, out);
}

inline KTheoryClass tau_apply(const KTheoryClass& x) {
  return apply_localized(x.context(), tau_data(x.context()).A, x);
}
inline KTheoryClass tau_inv_apply(const KTheoryClass& x) {
  return apply_localized(x.context(), tau_data(x.context()).B, x);
}

inline std::vector<std::vector<RatFun>> tau_matrix(const TrigContext& c, bool inverse = false) {
  const TauData& d = tau_data(c);
  std::vector<std::vector<RatFun>> m(d.I.size());
  for (std::size_t i = 0; i < d.I.size(); ++i)
    for (std::size_t j = 0; j < d.I.size(); ++j)
      m[i].push_back(RatFun((inverse ? d.B : d.A)[i][j], d.R[j]).reduced());
  return m;
}

inline long tau_det_exponent(int k, int n) { return -static_cast<long>(n) * (n - 1) / 2 * binomial(n - 1, k - 1); }

// D(Z) D(Z^-1) with the multiplicity C(n-2,k-1)
inline Poly d_product(const TrigContext& c) {
  Poly d = c.one();
  long e = binomial(c.n() - 2, c.k() - 1);
  for (int a = 2; a <= c.n(); ++a)
    for (int b = 1; b < a; ++b) {
      Poly f = (c.one() - c.Z(a) * c.Z(b, -1)) * (c.one() - c.Z(b) * c.Z(a, -1));
      d *= pow(f, static_cast<int>(e));
    }
  return d;
}

inline Poly d_tilde(const TrigContext& c) {
  Poly d = c.one();
  long e = binomial(c.n() - 2, c.k() - 2);
  for (int a = 1; a <= c.n(); ++a)
    for (int b = 1; b <= c.n(); ++b)
      if (a != b) d *= pow(c.one() - c.H() * c.Z(a) * c.Z(b, -1), static_cast<int>(e));
  return d;
}

struct SymbolicCheck {
  bool pass = true;
  std::string detail;
  void fail(const std::string& what) {
    if (pass) detail = what;
    pass = false;
  }
};

// det A (inverse = false) or det B, memoized; the 6x6 case at n = 4 takes a while
inline const Poly& row_normalized_det(const TrigContext& c, bool inverse) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, bool>, Poly> memo;
  auto key = std::make_tuple(c.k(), c.n(), inverse);
  {
    std::lock_guard lk(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  const TauData& d = tau_data(c);
  Poly v = det(inverse ? d.B : d.A);
  std::lock_guard lk(mu);
  return memo.emplace(key, std::move(v)).first->second;
}

// det tau = det(A) / prod_J R_J.  Exact in all variables.
inline RatFun tau_det(const TrigContext& c) {
  const TauData& d = tau_data(c);
  RatFun r(row_normalized_det(c, false));
  for (auto& x : d.R) r.divide_by(x, 1);
  return r.reduced();
}

// Z specialized to the given rationals, H kept symbolic.  Returns the
// determinant of the normalized matrix, a Laurent polynomial in H alone.
inline Poly tau_det_specialized(const TrigContext& c, const std::vector<mpq_class>& z, bool inverse = false) {
  const TauData& d = tau_data(c);
  MonomialMap m(c.ring(), c.ring());
  for (int a = 1; a <= c.n(); ++a) m.set(c.ring()->name(c.iZ(a)), z[a - 1], Monomial{});
  std::vector<std::vector<Poly>> s(d.I.size());
  Poly rp = c.one();
  for (std::size_t i = 0; i < d.I.size(); ++i) {
    for (std::size_t j = 0; j < d.I.size(); ++j) s[i].push_back(substitute((inverse ? d.B : d.A)[i][j], m));
    rp *= substitute(d.R[i], m);
  }
  if (rp.is_zero()) throw SingularBasis("specialization hits a diagonal");
  return exact_div(det(s), rp);
}

// Both displayed orthogonality relations, after clearing by the Vandermonde product.
inline SymbolicCheck orthogonality_check(const TrigContext& c) {
  SymbolicCheck res;
  const TauData& d = tau_data(c);
  std::size_t m = d.I.size();
  // W^inf(Z_I; Z_sigma_K) = E(Z_I) B_IK and W^0(H Z_K; Z_sigma_J) = E(Z_K) A_KJ
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Poly s1(c.ring()), s2(c.ring());
      for (std::size_t k = 0; k < m; ++k) {
        s1 += d.E[i] * d.B[i][k] * d.A[k][j] * d.VR[k];
        s2 += d.E[i] * d.A[i][k] * d.B[k][j] * d.VR[k];
      }
      Poly rhs = i == j ? d.E[i] * d.R[i] * d.V : Poly(c.ring());
      if (!(s1 == rhs))
        res.fail("first relation at I=" + d.I[i].to_json() + " J=" + d.I[j].to_json() + ": diff " + (s1 - rhs).to_string());
      if (!(s2 == rhs))
        res.fail("second relation at I=" + d.I[i].to_json() + " J=" + d.I[j].to_json() + ": diff " + (s2 - rhs).to_string());
    }
  return res;
}

// The weight-matrix determinants and their normalized versions.  Row I of the
// unnormalized matrix is E(Z_I) times row I of A (or B), so its determinant
// is prod_I E(Z_I) det A; this identity, prod_I E(Z_I) = D~ and
// prod_J R_J = D(Z) D(Z^-1) are each checked exactly.
inline SymbolicCheck weight_det_check(const TrigContext& c, bool direct = false) {
  SymbolicCheck res;
  const TauData& d = tau_data(c);
  long e = tau_det_exponent(c.k(), c.n());
  Poly dd = d_product(c), dt = d_tilde(c);
  Poly prodE = c.one(), prodR = c.one();
  for (auto& x : d.E) prodE *= x;
  for (auto& x : d.R) prodR *= x;
  if (!(prodE == dt)) res.fail("prod E(Z_I) != D~: " + (prodE - dt).to_string());
  if (!(prodR == dd)) res.fail("prod R_J != D(Z)D(Z^-1): " + (prodR - dd).to_string());
  const Poly& detA = row_normalized_det(c, false);
  const Poly& detB = row_normalized_det(c, true);
  if (!(detA == c.H(static_cast<int>(e)) * dd)) res.fail("det W0 normalized rows mismatch: " + detA.to_string());
  if (!(detB == c.H(static_cast<int>(-e)) * dd)) res.fail("det Winf normalized rows mismatch: " + detB.to_string());
  RatFun nA(detA, prodR), nB(detB, prodR);
  if (!(nA.reduced() == RatFun(c.H(static_cast<int>(e))))) res.fail("normalized det W0 != H^e");
  if (!(nB.reduced() == RatFun(c.H(static_cast<int>(-e))))) res.fail("normalized det Winf != H^-e");
  if (direct) {
    std::size_t m = d.I.size();
    std::vector<std::vector<Poly>> w0(m), wi(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        auto s = d.I[j].sigma();
        w0[i].push_back(eval_at_fixed_point(c, trig_weight_zero(c, s), d.I[i], true));
        wi[i].push_back(eval_at_fixed_point(c, trig_weight_inf(c, s), d.I[i], false));
      }
    Poly dh = dd * dt;
    if (!(det(w0) == c.H(static_cast<int>(e)) * dh)) res.fail("direct det W0 mismatch");
    if (!(det(wi) == c.H(static_cast<int>(-e)) * dh)) res.fail("direct det Winf mismatch");
  }
  return res;
}

// W^0_X or W^inf_X: sum_J W(T; Z_sigma_J) X|_J / R(Z_sigma_J)
inline Poly weight_of_class(const KTheoryClass& x, bool inf) {
  const TrigContext& c = x.context();
  const TauData& d = tau_data(c);
  Poly s(c.ring());
  for (std::size_t j = 0; j < d.I.size(); ++j)
    if (!x[j].is_zero()) s += trig_weight(c, inf ? 1 : 0, d.I[j].sigma()) * x[j] * d.VR[j];
  auto q = try_exact_div(s, d.V);
  if (!q) throw NotPolynomial("weight of class is not a Laurent polynomial");
  return *q;
}

// Random admissible class: restriction of a random symmetric polynomial in
// the Chern roots with coefficients in Z, H.
inline KTheoryClass random_class(const TrigContext& c, std::uint64_t seed, int terms = 3) {
  std::mt19937_64 g(seed);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1)); };
  // elementary symmetric functions in T and in Tb
  auto elem = [&](bool bar, int r) {
    int m = bar ? c.n() - c.k() : c.k();
    Poly s(c.ring());
    auto all = subsets(r, m);
    for (auto& S : all) {
      Poly t = c.one();
      for (int i : S.elements()) t *= bar ? c.Tb(i) : c.T(i);
      s += t;
    }
    return s;
  };
  Poly p(c.ring());
  for (int t = 0; t < terms; ++t) {
    Poly term(c.ring(), pick(-3, 3));
    if (term.is_zero()) term = c.one();
    term *= c.Z(pick(1, c.n()), pick(-1, 1)) * c.H(pick(-1, 1));
    if (c.k() > 0) term *= elem(false, pick(0, c.k()));
    if (c.n() - c.k() > 0) term *= elem(true, pick(0, c.n() - c.k()));
    if (c.k() > 0 && pick(0, 1)) term *= pow(elem(false, c.k()), -1);
    p += term;
  }
  return restrict_class(c, p);
}

}  // namespace kmono
