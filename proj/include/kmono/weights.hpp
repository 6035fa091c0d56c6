#pragma once

// Trigonometric (multiplicative) and cohomological (additive) weight functions.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "indexing.hpp"
#include "laurent.hpp"

namespace kmono {

// Variables Z1..Zn, H, T1..Tk, Tb1..Tb(n-k), L.  Tb stands for the second
// family of Chern roots; L is spare (characteristic polynomials).
class TrigContext {
 public:
  TrigContext(int k, int n) : k_(k), n_(n) {
    if (k < 0 || k > n) throw DomainError("need 0 <= k <= n");
    std::vector<std::string> v;
    for (int a = 1; a <= n; ++a) v.push_back("Z" + std::to_string(a));
    v.push_back("H");
    for (int i = 1; i <= k; ++i) v.push_back("T" + std::to_string(i));
    for (int s = 1; s <= n - k; ++s) v.push_back("Tb" + std::to_string(s));
    v.push_back("L");
    ring_ = make_ring(v);
  }
  int k() const { return k_; }
  int n() const { return n_; }
  const RingPtr& ring() const { return ring_; }

  std::size_t iZ(int a) const { return a - 1; }
  std::size_t iH() const { return n_; }
  std::size_t iT(int i) const { return n_ + i; }
  std::size_t iTb(int s) const { return n_ + k_ + s; }
  std::size_t iL() const { return 2 * n_ + 1; }

  Poly one() const { return Poly(ring_, 1); }
  Poly Z(int a, int e = 1) const { return Poly::var(ring_, iZ(a), e); }
  Poly H(int e = 1) const { return Poly::var(ring_, iH(), e); }
  Poly T(int i, int e = 1) const { return Poly::var(ring_, iT(i), e); }
  Poly Tb(int s, int e = 1) const { return Poly::var(ring_, iTb(s), e); }
  Poly L() const { return Poly::var(ring_, iL()); }

  std::vector<std::string> t_names() const {
    std::vector<std::string> v;
    for (int i = 1; i <= k_; ++i) v.push_back("T" + std::to_string(i));
    return v;
  }
  std::vector<std::string> tb_names() const {
    std::vector<std::string> v;
    for (int s = 1; s <= n_ - k_; ++s) v.push_back("Tb" + std::to_string(s));
    return v;
  }

  // Z_a -> Z_{sigma(a)}, sigma 1-based
  MonomialMap z_permutation(const std::vector<int>& sigma) const {
    MonomialMap m(ring_, ring_);
    for (int a = 1; a <= n_; ++a) {
      Monomial x;
      x.set(iZ(sigma[a - 1]), 1);
      m.set(ring_->name(iZ(a)), 1, x);
    }
    return m;
  }

 private:
  int k_, n_;
  RingPtr ring_;
};

namespace detail {
struct TrigCache {
  std::mutex mu;
  std::map<std::pair<int, int>, std::unique_ptr<TrigContext>> ctx;
  std::map<std::pair<int, int>, Poly> reduced;
  std::map<std::tuple<int, int, std::vector<int>, int>, Poly> weight;  // side 0 / 1
};
inline TrigCache& trig_cache() {
  static TrigCache c;
  return c;
}
}  // namespace detail

// Shared context so that all objects for (k,n) live in one ring.
inline const TrigContext& trig_context(int k, int n) {
  auto& c = detail::trig_cache();
  std::lock_guard lk(c.mu);
  auto& p = c.ctx[{k, n}];
  if (!p) p = std::make_unique<TrigContext>(k, n);
  return *p;
}

inline std::vector<int> identity_permutation(int n) {
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

inline RatFun u_factor(const TrigContext& c) {
  const int k = c.k();
  Poly num = c.one();
  std::vector<Poly> den;
  for (int i = 1; i <= k; ++i) {
    for (int a = 1; a < i; ++a) num *= c.one() - c.H() * c.Z(a) * c.T(i, -1);
    for (int b = i + 1; b <= k; ++b) num *= c.one() - c.Z(b) * c.T(i, -1);
    for (int j = i + 1; j <= k; ++j) {
      num *= c.one() - c.H() * c.T(j) * c.T(i, -1);
      den.push_back(c.one() - c.T(j) * c.T(i, -1));
    }
  }
  return RatFun::with_factors(num, den);
}

inline Poly trig_weight_reduced(const TrigContext& c) {
  auto& cache = detail::trig_cache();
  {
    std::lock_guard lk(cache.mu);
    auto it = cache.reduced.find({c.k(), c.n()});
    if (it != cache.reduced.end()) return it->second;
  }
  // 120 terms of a ~10^6-term numerator does not fit in memory
  if (c.k() >= 5) throw SizeLimit("reduced weight function needs k <= 4");
  Poly w = symmetrize_to_polynomial(u_factor(c), c.t_names());
  std::lock_guard lk(cache.mu);
  return cache.reduced.emplace(std::make_pair(c.k(), c.n()), w).first->second;
}

// side 0: W^0(T; Z_sigma; H), side 1: W^inf(T; Z_sigma; H)
inline Poly trig_weight(const TrigContext& c, int side, const std::vector<int>& sigma) {
  auto& cache = detail::trig_cache();
  auto key = std::make_tuple(c.k(), c.n(), sigma, side);
  {
    std::lock_guard lk(cache.mu);
    auto it = cache.weight.find(key);
    if (it != cache.weight.end()) return it->second;
  }
  Poly w;
  auto id = identity_permutation(c.n());
  if (sigma != id) {
    w = substitute(trig_weight(c, side, id), c.z_permutation(sigma));
  } else {
    w = trig_weight_reduced(c);
    for (int i = 1; i <= c.k(); ++i)
      for (int a = c.k() + 1; a <= c.n(); ++a)
        w *= c.one() - (side ? c.H() : c.one()) * c.Z(a) * c.T(i, -1);
    if (side) w *= c.H(c.k() * (c.k() - 1) / 2);
  }
  std::lock_guard lk(cache.mu);
  return cache.weight.emplace(key, w).first->second;
}

inline Poly trig_weight_zero(const TrigContext& c, const std::vector<int>& sigma) { return trig_weight(c, 0, sigma); }
inline Poly trig_weight_zero(const TrigContext& c) { return trig_weight(c, 0, identity_permutation(c.n())); }
inline Poly trig_weight_inf(const TrigContext& c, const std::vector<int>& sigma) { return trig_weight(c, 1, sigma); }
inline Poly trig_weight_inf(const TrigContext& c) { return trig_weight(c, 1, identity_permutation(c.n())); }

// E(T;H)
inline Poly e_poly(const TrigContext& c) {
  Poly e = c.one();
  for (int i = 1; i <= c.k(); ++i)
    for (int j = 1; j <= c.k(); ++j)
      if (i != j) e *= c.one() - c.H() * c.T(i) * c.T(j, -1);
  return e;
}

// E(Z_I;H)
inline Poly e_at(const TrigContext& c, const FixedPointIndex& I) {
  Poly e = c.one();
  for (int a : I.elements())
    for (int b : I.elements())
      if (a != b) e *= c.one() - c.H() * c.Z(a) * c.Z(b, -1);
  return e;
}

// R(Z_sigma) = prod_{a<=k<b} (1 - Z_sigma(b)/Z_sigma(a))
inline Poly r_mult(const TrigContext& c, const std::vector<int>& sigma) {
  Poly r = c.one();
  for (int a = 1; a <= c.k(); ++a)
    for (int b = c.k() + 1; b <= c.n(); ++b) r *= c.one() - c.Z(sigma[b - 1]) * c.Z(sigma[a - 1], -1);
  return r;
}
inline Poly r_mult(const TrigContext& c) { return r_mult(c, identity_permutation(c.n())); }

// T_j -> Z_{i_j}, or H Z_{i_j} when shifted
inline MonomialMap fixed_point_map(const TrigContext& c, const FixedPointIndex& I, bool shift) {
  MonomialMap m(c.ring(), c.ring());
  for (int j = 1; j <= c.k(); ++j) {
    Monomial x;
    x.set(c.iZ(I[j - 1]), 1);
    if (shift) x.set(c.iH(), 1);
    m.set(c.ring()->name(c.iT(j)), 1, x);
  }
  auto Ib = I.complement();
  for (int s = 1; s <= c.n() - c.k(); ++s) {
    Monomial x;
    x.set(c.iZ(Ib[s - 1]), 1);
    m.set(c.ring()->name(c.iTb(s)), 1, x);
  }
  return m;
}

inline Poly eval_at_fixed_point(const TrigContext& c, const Poly& w, const FixedPointIndex& I, bool shift) {
  return substitute(w, fixed_point_map(c, I, shift));
}

// symmetric under every permutation of the listed variables
inline bool is_symmetric_in(const Poly& p, const std::vector<std::string>& vars) {
  const RingPtr& r = p.ring();
  for (std::size_t a = 0; a + 1 < vars.size(); ++a) {
    // adjacent transpositions generate the symmetric group
    MonomialMap m(r, r);
    Monomial x, y;
    x.set(r->index(vars[a + 1]), 1);
    y.set(r->index(vars[a]), 1);
    m.set(vars[a], 1, x);
    m.set(vars[a + 1], 1, y);
    if (!(substitute(p, m) == p)) return false;
  }
  return true;
}

// Membership in the space P: degree bounds in T^-1, symmetry in T, and
// vanishing at T1 = Z_a, T2 = H Z_a.
inline bool membership_P(const TrigContext& c, const Poly& p) {
  for (auto& t : p.terms())
    for (int i = 1; i <= c.k(); ++i) {
      int e = t.m[c.iT(i)];
      if (e > 0 || e < -(c.n() - 1)) return false;
    }
  if (!is_symmetric_in(p, c.t_names())) return false;
  if (c.k() >= 2) {
    for (int a = 1; a <= c.n(); ++a) {
      MonomialMap m(c.ring(), c.ring());
      m.set("T1", c.Z(a));
      m.set("T2", c.H() * c.Z(a));
      if (!substitute(p, m).is_zero()) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Additive side: t1..tk, g1..gk, gb1..gb(n-k), z1..zn, h.

class CohContext {
 public:
  CohContext(int k, int n) : k_(k), n_(n) {
    if (k < 0 || k > n) throw DomainError("need 0 <= k <= n");
    std::vector<std::string> v;
    for (int i = 1; i <= k; ++i) v.push_back("t" + std::to_string(i));
    for (int i = 1; i <= k; ++i) v.push_back("g" + std::to_string(i));
    for (int s = 1; s <= n - k; ++s) v.push_back("gb" + std::to_string(s));
    for (int a = 1; a <= n; ++a) v.push_back("z" + std::to_string(a));
    v.push_back("h");
    ring_ = make_ring(v);
  }
  int k() const { return k_; }
  int n() const { return n_; }
  const RingPtr& ring() const { return ring_; }
  std::size_t it(int i) const { return i - 1; }
  std::size_t ig(int i) const { return k_ + i - 1; }
  std::size_t igb(int s) const { return 2 * k_ + s - 1; }
  std::size_t iz(int a) const { return n_ + k_ + a - 1; }
  std::size_t ih() const { return 2 * n_ + k_; }

  Poly one() const { return Poly(ring_, 1); }
  Poly t(int i) const { return Poly::var(ring_, it(i)); }
  Poly g(int i) const { return Poly::var(ring_, ig(i)); }
  Poly gb(int s) const { return Poly::var(ring_, igb(s)); }
  Poly z(int a) const { return Poly::var(ring_, iz(a)); }
  Poly h() const { return Poly::var(ring_, ih()); }
  std::vector<std::string> t_names() const {
    std::vector<std::string> v;
    for (int i = 1; i <= k_; ++i) v.push_back("t" + std::to_string(i));
    return v;
  }
  std::vector<std::string> g_names() const {
    std::vector<std::string> v;
    for (int i = 1; i <= k_; ++i) v.push_back("g" + std::to_string(i));
    return v;
  }

 private:
  int k_, n_;
  RingPtr ring_;
};

inline Poly coh_weight(const CohContext& c) {
  const int k = c.k();
  Poly num = c.one();
  std::vector<Poly> den;
  for (int i = 1; i <= k; ++i) {
    for (int l = 1; l < i; ++l) num *= c.t(i) - c.g(l) - c.h();
    for (int m = i + 1; m <= k; ++m) num *= c.t(i) - c.g(m);
    for (int j = i + 1; j <= k; ++j) {
      num *= c.t(i) - c.t(j) - c.h();
      den.push_back(c.t(i) - c.t(j));
    }
  }
  Poly w = symmetrize_to_polynomial(RatFun::with_factors(num, den), c.t_names());
  for (int i = 1; i <= k; ++i)
    for (int s = 1; s <= c.n() - k; ++s) w *= c.t(i) - c.gb(s);
  return w;
}

inline Poly q_class(const CohContext& c) {
  Poly q = c.one();
  for (int i = 1; i <= c.k(); ++i)
    for (int s = 1; s <= c.n() - c.k(); ++s) q *= c.g(i) - c.gb(s) - c.h();
  return q;
}

// gamma -> z_J, gamma-bar -> z_{J complement}
inline std::vector<std::optional<Poly>> coh_fixed_point_images(const CohContext& c, const FixedPointIndex& J) {
  std::vector<std::optional<Poly>> img(c.ring()->size());
  for (std::size_t v = 0; v < img.size(); ++v) img[v] = Poly::var(c.ring(), v);
  auto Jb = J.complement();
  for (int i = 1; i <= c.k(); ++i) img[c.ig(i)] = c.z(J[i - 1]);
  for (int s = 1; s <= c.n() - c.k(); ++s) img[c.igb(s)] = c.z(Jb[s - 1]);
  return img;
}

inline Poly coh_restrict(const CohContext& c, const Poly& p, const FixedPointIndex& J) {
  return substitute(p, c.ring(), coh_fixed_point_images(c, J));
}

}  // namespace kmono
