#pragma once

// Schur polynomials as alternant ratios, expansion of localized classes in
// the Schur basis, and the integer matrices built from it.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ktheory.hpp"

namespace kmono {

// x1..xn, one shared ring per n
inline const RingPtr& x_ring(int n) {
  static std::mutex mu;
  static std::map<int, RingPtr> rings;
  std::lock_guard lk(mu);
  auto& r = rings[n];
  if (!r) {
    std::vector<std::string> v;
    for (int a = 1; a <= n; ++a) v.push_back("x" + std::to_string(a));
    r = make_ring(v);
  }
  return r;
}

// prod_{a<b} (y_b - y_a) over the listed variables
inline Poly vandermonde_in(const RingPtr& ring, const std::vector<std::size_t>& vars) {
  Poly v(ring, 1);
  for (std::size_t a = 0; a < vars.size(); ++a)
    for (std::size_t b = a + 1; b < vars.size(); ++b) v *= Poly::var(ring, vars[b]) - Poly::var(ring, vars[a]);
  return v;
}

// V_I(x_1..x_m), m = |I|, in x_ring(I.n())
inline Poly schur_V(const FixedPointIndex& I) {
  static std::mutex mu;
  static std::map<std::pair<int, std::vector<int>>, Poly> memo;
  auto key = std::make_pair(I.n(), I.elements());
  {
    std::lock_guard lk(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  const RingPtr& r = x_ring(std::max(I.n(), 1));
  int m = I.k();
  std::vector<std::vector<Poly>> num(m), den(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      num[a].push_back(Poly::var(r, a, I[b]));
      den[a].push_back(Poly::var(r, a, b + 1));
    }
  Poly v = m == 0 ? Poly(r, 1) : exact_div(det(num), det(den));
  std::lock_guard lk(mu);
  return memo.emplace(key, v).first->second;
}

// V_I with x_a replaced by the a-th listed variable of another ring
inline Poly schur_V_at(const FixedPointIndex& I, const RingPtr& ring, const std::vector<std::size_t>& vars) {
  Poly v = schur_V(I);
  MonomialMap m(v.ring(), ring);
  for (std::size_t a = 0; a < v.ring()->size(); ++a) {
    Monomial x;
    if (a < vars.size()) x.set(vars[a], 1);
    m.set(v.ring()->name(a), 1, x);  // unused x's never occur in V_I
  }
  return substitute(v, m);
}

inline std::vector<std::size_t> z_indices(const TrigContext& c, const std::vector<int>& a) {
  std::vector<std::size_t> v;
  for (int x : a) v.push_back(c.iZ(x));
  return v;
}

inline std::vector<std::size_t> zero_based(const std::vector<int>& a) {
  std::vector<std::size_t> v;
  for (int x : a) v.push_back(x - 1);
  return v;
}

// det (V_I(x_J))_{I,J}
inline Poly schur_basis_det(int k, int n) {
  const RingPtr& r = x_ring(n);
  auto I = subsets(k, n);
  std::vector<std::vector<Poly>> m(I.size());
  for (std::size_t i = 0; i < I.size(); ++i)
    for (auto& J : I) {
      std::vector<std::size_t> v;
      for (int a : J.elements()) v.push_back(a - 1);
      m[i].push_back(schur_V_at(I[i], r, v));
    }
  return det(m);
}

// Same determinant with x_1..x_{n-1} set to the given rationals; x_n stays
// symbolic.  Used where the full 10x10 symbolic determinant is too large.
inline Poly schur_basis_det_specialized(int k, int n, const std::vector<mpq_class>& vals) {
  const RingPtr& r = x_ring(n);
  MonomialMap sp(r, r);
  for (int a = 1; a < n; ++a) sp.set(r->name(a - 1), vals.at(a - 1), Monomial{});
  auto I = subsets(k, n);
  std::vector<std::vector<Poly>> m(I.size());
  for (std::size_t i = 0; i < I.size(); ++i)
    for (auto& J : I) m[i].push_back(substitute(schur_V_at(I[i], r, zero_based(J.elements())), sp));
  return det(m);
}

inline Poly schur_basis_det_closed_form(int k, int n) {
  std::vector<std::size_t> all;
  for (int a = 0; a < n; ++a) all.push_back(a);
  long e = binomial(n - 2, k - 1);
  return n < 2 ? Poly(x_ring(std::max(n, 1)), 1) : pow(vandermonde_in(x_ring(n), all), static_cast<int>(e));
}

// R(x_I; x_complement) = prod_{a in I, b not in I} (x_b - x_a)
inline Poly r_split(const RingPtr& r, const std::vector<std::size_t>& in, const std::vector<std::size_t>& out) {
  Poly p(r, 1);
  for (auto a : in)
    for (auto b : out) p *= Poly::var(r, b) - Poly::var(r, a);
  return p;
}

// Both Laplace-expansion identities; the second one multiplied through by
// the full Vandermonde product.
inline SymbolicCheck laplace_checks(int k, int n) {
  SymbolicCheck res;
  const RingPtr& r = x_ring(std::max(n, 1));
  auto I = subsets(k, n);
  std::vector<std::size_t> lo, hi, all;
  for (int a = 0; a < n; ++a) {
    (a < k ? lo : hi).push_back(a);
    all.push_back(a);
  }
  Poly s1(r);
  for (auto& S : I) {
    Poly t = schur_V_at(S, r, lo) * schur_V_at(S.complement(), r, hi);
    s1 += S.ell() % 2 ? -t : t;
  }
  Poly rhs1 = r_split(r, lo, hi);
  if (!(s1 == rhs1)) res.fail("first Laplace identity: diff " + (s1 - rhs1).to_string());

  Poly vx = vandermonde_in(r, all);
  std::vector<Poly> cleared;  // vx / R(x_S; x_complement)
  for (auto& S : I) cleared.push_back(exact_div(vx, r_split(r, zero_based(S.elements()), zero_based(S.complement().elements()))));
  for (auto& J : I)
    for (auto& K : I) {
      Poly s(r);
      for (std::size_t i = 0; i < I.size(); ++i)
        s += schur_V_at(J, r, zero_based(I[i].elements())) *
             schur_V_at(K.complement(), r, zero_based(I[i].complement().elements())) * cleared[i];
      Poly rhs = J == K ? (J.ell() % 2 ? -vx : vx) : Poly(r);
      if (!(s == rhs)) res.fail("second Laplace identity at J=" + J.to_json() + " K=" + K.to_json());
    }
  return res;
}

// Per-(k,n) data for expansions in the Schur basis, over the Z variables.
struct SchurData {
  std::vector<FixedPointIndex> I;
  std::vector<KTheoryClass> basis;      // restrictions of V_I(Gamma)
  std::vector<std::vector<Poly>> vbar;  // vbar[i][j] = V_{complement of I_i}(Z_{complement of J_j})
  std::vector<Poly> cleared;            // Vz / R(Z_J; Z_complement)
  Poly vz;
};

inline const SchurData& schur_data(const TrigContext& c) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const SchurData>> memo;
  {
    std::lock_guard lk(mu);
    auto it = memo.find({c.k(), c.n()});
    if (it != memo.end()) return *it->second;
  }
  auto d = std::make_shared<SchurData>();
  d->I = subsets(c.k(), c.n());
  std::vector<int> all;
  for (int a = 1; a <= c.n(); ++a) all.push_back(a);
  d->vz = vandermonde_in(c.ring(), z_indices(c, all));
  for (auto& J : d->I) {
    std::vector<Poly> r;
    for (auto& K : d->I) r.push_back(schur_V_at(J, c.ring(), z_indices(c, K.elements())));
    d->basis.emplace_back(c, r);
    auto in = z_indices(c, J.elements()), out = z_indices(c, J.complement().elements());
    d->cleared.push_back(exact_div(d->vz, r_split(c.ring(), in, out)));
  }
  for (auto& S : d->I) {
    std::vector<Poly> row;
    for (auto& J : d->I) row.push_back(schur_V_at(S.complement(), c.ring(), z_indices(c, J.complement().elements())));
    d->vbar.push_back(row);
  }
  std::lock_guard lk(mu);
  auto& slot = memo[{c.k(), c.n()}];
  if (!slot) slot = d;
  return *slot;
}

inline KTheoryClass schur_class(const TrigContext& c, const FixedPointIndex& I) {
  return schur_data(c).basis[subset_rank(I)];
}

// c_I = (-1)^l(I) sum_J X|_J V_{I complement}(Z_{J complement}) / R(Z_J; Z_{J complement})
inline std::vector<Poly> expand_in_schur(const KTheoryClass& x) {
  const TrigContext& c = x.context();
  const SchurData& d = schur_data(c);
  std::vector<Poly> out;
  for (std::size_t i = 0; i < d.I.size(); ++i) {
    Poly s(c.ring());
    for (std::size_t j = 0; j < d.I.size(); ++j)
      if (!x[j].is_zero()) s += x[j] * d.vbar[i][j] * d.cleared[j];
    Poly q = exact_div(s, d.vz);
    out.push_back(d.I[i].ell() % 2 ? -q : q);
  }
  return out;
}

inline KTheoryClass from_schur(const TrigContext& c, const std::vector<Poly>& coeffs) {
  const SchurData& d = schur_data(c);
  KTheoryClass x = KTheoryClass::zero(c);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (!coeffs[i].is_zero()) x = x + coeffs[i] * d.basis[i];
  return x;
}

using PolyMatrix = std::vector<std::vector<Poly>>;

inline void require_integral(const PolyMatrix& m, const std::string& what) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j)
      if (!m[i][j].integer_coefficients())
        throw IntegralityViolation(what + " entry (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") = " + m[i][j].to_string());
}

inline PolyMatrix matmul(const PolyMatrix& a, const PolyMatrix& b) {
  PolyMatrix r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j) {
      Poly s(a[i][0].ring());
      for (std::size_t l = 0; l < b.size(); ++l)
        if (!a[i][l].is_zero() && !b[l][j].is_zero()) s += a[i][l] * b[l][j];
      r[i].push_back(s);
    }
  return r;
}

inline PolyMatrix identity_matrix(const RingPtr& r, std::size_t n) {
  PolyMatrix m(n, std::vector<Poly>(n, Poly(r)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Poly(r, 1);
  return m;
}

// rows: Schur coordinates of Gamma_1...Gamma_k V_I(Gamma)
inline PolyMatrix m_matrix(const TrigContext& c) {
  const SchurData& d = schur_data(c);
  PolyMatrix m;
  for (auto& b : d.basis) m.push_back(expand_in_schur(b.times_det()));
  require_integral(m, "M");
  return m;
}

// rows: Schur coordinates of tau(V_I(Gamma)), or of tau^-1(V_I(Gamma))
inline PolyMatrix t_matrix(const TrigContext& c, bool inverse = false) {
  const SchurData& d = schur_data(c);
  PolyMatrix m;
  for (auto& b : d.basis) m.push_back(expand_in_schur(inverse ? tau_inv_apply(b) : tau_apply(b)));
  require_integral(m, inverse ? "Tinv" : "T");
  return m;
}
inline PolyMatrix t_inv_matrix(const TrigContext& c) { return t_matrix(c, true); }

struct MonodromyMatrices {
  PolyMatrix zero_on_zero;  // M
  PolyMatrix inf_on_zero;   // T M T^-1, times the scalar
  PolyMatrix zero_on_inf;   // T^-1 M T
  PolyMatrix inf_on_inf;    // M, times the scalar
  Poly scalar;              // H^k, standing for exp(2 pi i k h)
  PolyMatrix M, T, Tinv;
};

inline MonodromyMatrices monodromy_matrices(const TrigContext& c) {
  MonodromyMatrices r;
  r.M = m_matrix(c);
  r.T = t_matrix(c);
  r.Tinv = t_inv_matrix(c);
  r.zero_on_zero = r.M;
  r.inf_on_zero = matmul(matmul(r.T, r.M), r.Tinv);
  r.zero_on_inf = matmul(matmul(r.Tinv, r.M), r.T);
  r.inf_on_inf = r.M;
  require_integral(r.inf_on_zero, "T M Tinv");
  require_integral(r.zero_on_inf, "Tinv M T");
  r.scalar = c.H(c.k());
  return r;
}

inline Poly trace(const PolyMatrix& m) {
  Poly t(m[0][0].ring());
  for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return t;
}

// det(L - M), L the spare variable of the context.  Faddeev-LeVerrier:
// Bareiss with L in the entries is far slower on the conjugated matrices.
inline Poly char_poly(const TrigContext& c, const PolyMatrix& m) {
  std::size_t n = m.size();
  std::vector<Poly> coef(n + 1, Poly(c.ring()));
  coef[n] = c.one();
  PolyMatrix mk(n, std::vector<Poly>(n, Poly(c.ring())));
  for (std::size_t k = 1; k <= n; ++k) {
    mk = matmul(m, mk);
    for (std::size_t i = 0; i < n; ++i) mk[i][i] += coef[n - k + 1];
    coef[n - k] = trace(matmul(m, mk)) * mpq_class(-1, static_cast<long>(k));
  }
  Poly p(c.ring());
  for (std::size_t j = 0; j <= n; ++j) p += coef[j] * pow(c.L(), static_cast<int>(j));
  return p;
}

inline PolyMatrix substitute(const PolyMatrix& m, const MonomialMap& sp) {
  PolyMatrix r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (auto& e : m[i]) r[i].push_back(substitute(e, sp));
  return r;
}

// Characteristic polynomials of M, T M T^-1 and T^-1 M T agree.  Symbolic in
// everything when the matrix is small; otherwise Z is set to a few rational
// points and H, L stay symbolic (powers of the 6x6 conjugates at (2,4) blow up).
inline SymbolicCheck charpoly_invariance(const TrigContext& c, const MonodromyMatrices& mm) {
  SymbolicCheck res;
  auto cmp = [&](const PolyMatrix& a, const PolyMatrix& b, const PolyMatrix& m, const std::string& at) {
    Poly pm = char_poly(c, m);
    if (!(char_poly(c, a) == pm)) res.fail("char poly of T M Tinv differs" + at);
    if (!(char_poly(c, b) == pm)) res.fail("char poly of Tinv M T differs" + at);
  };
  if (mm.M.size() <= 4) {
    cmp(mm.inf_on_zero, mm.zero_on_inf, mm.M, "");
    return res;
  }
  const std::vector<std::vector<long>> pts{{2, -3, 5, 7, -11, 13}, {-4, 9, 3, -5, 8, 6}, {7, 2, -9, 4, -3, 10}};
  for (auto& pt : pts) {
    MonomialMap sp(c.ring(), c.ring());
    std::string at = " at Z = (";
    for (int a = 1; a <= c.n(); ++a) {
      sp.set(c.ring()->name(c.iZ(a)), mpq_class(pt[a - 1], a + 1), Monomial{});
      at += (a > 1 ? "," : "") + std::to_string(pt[a - 1]) + "/" + std::to_string(a + 1);
    }
    cmp(substitute(mm.inf_on_zero, sp), substitute(mm.zero_on_inf, sp), substitute(mm.M, sp), at + ")");
  }
  return res;
}

}  // namespace kmono
