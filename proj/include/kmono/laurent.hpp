#pragma once

// Exact Laurent polynomials over Q in a fixed, ordered set of variables,
// and rational functions with a factored denominator.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace kmono {

inline constexpr std::size_t kMaxVars = 16;

class Ring {
 public:
  explicit Ring(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxVars) throw TooManyVariables("ring has more than 16 variables");
  }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view n) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return i;
    return std::nullopt;
  }
  std::size_t index(std::string_view n) const {
    auto i = find(n);
    if (!i) throw Error("unknown variable " + std::string(n));
    return *i;
  }

 private:
  std::vector<std::string> names_;
};

using RingPtr = std::shared_ptr<const Ring>;

inline RingPtr make_ring(std::vector<std::string> names) {
  return std::make_shared<const Ring>(std::move(names));
}

struct Monomial {
  std::array<std::int16_t, kMaxVars> e{};
  std::int32_t deg = 0;

  int operator[](std::size_t i) const { return e[i]; }
  void set(std::size_t i, int v) {
    check(v);
    deg += v - e[i];
    e[i] = static_cast<std::int16_t>(v);
  }
  bool is_one() const {
    for (auto x : e)
      if (x) return false;
    return true;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      int v = a.e[i] + b.e[i];
      check(v);
      r.e[i] = static_cast<std::int16_t>(v);
    }
    r.deg = a.deg + b.deg;
    return r;
  }
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      int v = a.e[i] - b.e[i];
      check(v);
      r.e[i] = static_cast<std::int16_t>(v);
    }
    r.deg = a.deg - b.deg;
    return r;
  }
  // true if b/a has no negative exponent
  bool divides(const Monomial& b) const {
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (e[i] > b.e[i]) return false;
    return true;
  }

 private:
  static void check(int v) {
    if (v > 32000 || v < -32000) throw SizeLimit("exponent overflow");
  }
};

// Graded lex; earlier variables are more significant. Positive if a comes first.
inline int grlex_cmp(const Monomial& a, const Monomial& b) {
  if (a.deg != b.deg) return a.deg > b.deg ? 1 : -1;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
  return 0;
}

struct GrlexFirst {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_cmp(a, b) > 0; }
};

struct Term {
  Monomial m;
  mpq_class c;
};

inline mpq_class qpow(const mpq_class& c, int e) {
  if (e == 0) return 1;
  if (c == 0) {
    if (e < 0) throw ZeroImage("zero raised to a negative power");
    return 0;
  }
  mpz_class n = c.get_num(), d = c.get_den();
  unsigned long u = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_class pn, pd;
  mpz_pow_ui(pn.get_mpz_t(), n.get_mpz_t(), u);
  mpz_pow_ui(pd.get_mpz_t(), d.get_mpz_t(), u);
  mpq_class r = e > 0 ? mpq_class(pn, pd) : mpq_class(pd, pn);
  r.canonicalize();
  return r;
}

class LaurentPolynomial {
 public:
  LaurentPolynomial() = default;
  explicit LaurentPolynomial(RingPtr r) : ring_(std::move(r)) {}
  LaurentPolynomial(RingPtr r, const mpq_class& c) : ring_(std::move(r)) {
    if (c != 0) terms_.push_back({Monomial{}, c});
    if (!terms_.empty()) terms_[0].c.canonicalize();
  }

  static LaurentPolynomial var(RingPtr r, std::size_t i, int e = 1) {
    Monomial m;
    m.set(i, e);
    return monomial(std::move(r), 1, m);
  }
  static LaurentPolynomial var(RingPtr r, std::string_view n, int e = 1) {
    auto i = r->index(n);
    return var(std::move(r), i, e);
  }
  static LaurentPolynomial monomial(RingPtr r, const mpq_class& c, const Monomial& m) {
    LaurentPolynomial p(std::move(r));
    if (c != 0) p.terms_.push_back({m, c});
    if (!p.terms_.empty()) p.terms_[0].c.canonicalize();
    return p;
  }
  // Sorts and merges; input may contain duplicates and zeros.
  // canonical = true skips normalizing coefficients that are already in lowest terms
  static LaurentPolynomial from_terms(RingPtr r, std::vector<Term> t, bool canonical = false) {
    if (!canonical)
      for (auto& x : t) x.c.canonicalize();
    std::sort(t.begin(), t.end(),
              [](const Term& a, const Term& b) { return grlex_cmp(a.m, b.m) > 0; });
    LaurentPolynomial p(std::move(r));
    for (auto& x : t) {
      if (!p.terms_.empty() && p.terms_.back().m == x.m)
        p.terms_.back().c += x.c;
      else {
        if (!p.terms_.empty() && p.terms_.back().c == 0) p.terms_.pop_back();
        p.terms_.push_back(std::move(x));
      }
    }
    if (!p.terms_.empty() && p.terms_.back().c == 0) p.terms_.pop_back();
    return p;
  }

  const RingPtr& ring() const { return ring_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_one()); }
  bool is_monomial() const { return terms_.size() == 1; }
  mpq_class constant_value() const {
    if (!is_constant()) throw Error("not a constant");
    return terms_.empty() ? mpq_class(0) : terms_[0].c;
  }
  const Term& leading() const { return terms_.front(); }

  bool integer_coefficients() const {
    for (auto& t : terms_)
      if (t.c.get_den() != 1) return false;
    return true;
  }
  // nonnegative exponents throughout
  bool is_polynomial() const {
    for (auto& t : terms_)
      for (auto x : t.m.e)
        if (x < 0) return false;
    return true;
  }

  Monomial min_exponents() const {
    Monomial m;
    if (terms_.empty()) return m;
    m = terms_[0].m;
    for (auto& t : terms_)
      for (std::size_t i = 0; i < kMaxVars; ++i) m.e[i] = std::min(m.e[i], t.m.e[i]);
    m.deg = 0;
    for (auto x : m.e) m.deg += x;
    return m;
  }
  Monomial max_exponents() const {
    Monomial m;
    if (terms_.empty()) return m;
    m = terms_[0].m;
    for (auto& t : terms_)
      for (std::size_t i = 0; i < kMaxVars; ++i) m.e[i] = std::max(m.e[i], t.m.e[i]);
    m.deg = 0;
    for (auto x : m.e) m.deg += x;
    return m;
  }
  bool involves(std::size_t var) const {
    for (auto& t : terms_)
      if (t.m.e[var]) return true;
    return false;
  }

  LaurentPolynomial operator-() const {
    LaurentPolynomial r = *this;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
  }
  LaurentPolynomial& operator+=(const LaurentPolynomial& o) { return *this = add(*this, o, false); }
  LaurentPolynomial& operator-=(const LaurentPolynomial& o) { return *this = add(*this, o, true); }
  LaurentPolynomial& operator*=(const LaurentPolynomial& o) { return *this = *this * o; }
  friend LaurentPolynomial operator+(const LaurentPolynomial& a, const LaurentPolynomial& b) { return add(a, b, false); }
  friend LaurentPolynomial operator-(const LaurentPolynomial& a, const LaurentPolynomial& b) { return add(a, b, true); }

  friend LaurentPolynomial operator*(const LaurentPolynomial& a, const mpq_class& c) {
    if (c == 0) return LaurentPolynomial(a.ring_);
    LaurentPolynomial r = a;
    for (auto& t : r.terms_) t.c *= c;
    return r;
  }
  friend LaurentPolynomial operator*(const mpq_class& c, const LaurentPolynomial& a) { return a * c; }

  LaurentPolynomial mul_monomial(const mpq_class& c, const Monomial& m) const {
    if (c == 0) return LaurentPolynomial(ring_);
    bool unit_m = m.is_one(), unit_c = c == 1;
    if (unit_m && unit_c) return *this;
    LaurentPolynomial r(ring_);
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) r.terms_.push_back({unit_m ? t.m : t.m * m, unit_c ? t.c : t.c * c});
    return r;  // order preserved: grlex is compatible with multiplication
  }

  friend LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    RingPtr ring = common_ring(a, b);
    if (a.is_zero() || b.is_zero()) return LaurentPolynomial(ring);
    const LaurentPolynomial& s = a.size() <= b.size() ? a : b;
    const LaurentPolynomial& l = a.size() <= b.size() ? b : a;
    if (s.size() == 1) {
      auto r = l.mul_monomial(s.terms_[0].c, s.terms_[0].m);
      r.ring_ = ring;
      return r;
    }
    std::vector<std::vector<Term>> runs;
    runs.reserve(s.size());
    for (auto& t : s.terms_) {
      std::vector<Term> run;
      run.reserve(l.size());
      for (auto& u : l.terms_) run.push_back({t.m * u.m, t.c * u.c});
      runs.push_back(std::move(run));
    }
    while (runs.size() > 1) {
      std::vector<std::vector<Term>> next;
      next.reserve((runs.size() + 1) / 2);
      for (std::size_t i = 0; i + 1 < runs.size(); i += 2) next.push_back(merge(runs[i], runs[i + 1], false));
      if (runs.size() % 2) next.push_back(std::move(runs.back()));
      runs = std::move(next);
    }
    LaurentPolynomial r(ring);
    r.terms_ = std::move(runs[0]);
    return r;
  }

  friend bool operator==(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    common_ring(a, b);
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (!(a.terms_[i].m == b.terms_[i].m) || a.terms_[i].c != b.terms_[i].c) return false;
    return true;
  }
  // structural total order, used for canonical factor maps
  friend bool structurally_less(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      int c = grlex_cmp(a.terms_[i].m, b.terms_[i].m);
      if (c) return c > 0;
      if (a.terms_[i].c != b.terms_[i].c) return a.terms_[i].c < b.terms_[i].c;
    }
    return a.size() < b.size();
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += " + ";
      s += terms_[i].c.get_str();
      for (std::size_t v = 0; v < kMaxVars; ++v) {
        int e = terms_[i].m.e[v];
        if (!e) continue;
        s += " * ";
        s += ring_ ? ring_->name(v) : "x" + std::to_string(v);
        if (e != 1) s += "^" + std::to_string(e);
      }
    }
    return s;
  }

  template <class T>
  std::complex<T> evaluate(std::span<const std::complex<T>> values) const;

  static RingPtr common_ring(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    if (a.ring_ == b.ring_) return a.ring_;
    if (!a.ring_) return b.ring_;
    if (!b.ring_) return a.ring_;
    if (a.ring_->names() != b.ring_->names()) throw Error("ring mismatch");
    return a.ring_;
  }

 private:
  friend class ExactDivider;

  static std::vector<Term> merge(const std::vector<Term>& x, const std::vector<Term>& y, bool negate_y) {
    std::vector<Term> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
      int c = i == x.size() ? -1 : j == y.size() ? 1 : grlex_cmp(x[i].m, y[j].m);
      if (c > 0) {
        out.push_back(x[i++]);
      } else if (c < 0) {
        out.push_back(y[j++]);
        if (negate_y) out.back().c = -out.back().c;
      } else {
        mpq_class s = negate_y ? mpq_class(x[i].c - y[j].c) : mpq_class(x[i].c + y[j].c);
        if (s != 0) out.push_back({x[i].m, std::move(s)});
        ++i, ++j;
      }
    }
    return out;
  }
  static LaurentPolynomial add(const LaurentPolynomial& a, const LaurentPolynomial& b, bool sub) {
    LaurentPolynomial r(common_ring(a, b));
    r.terms_ = merge(a.terms_, b.terms_, sub);
    return r;
  }

  RingPtr ring_;
  std::vector<Term> terms_;
};

using Poly = LaurentPolynomial;

namespace detail {
template <class T>
std::complex<T> pairwise_sum(const std::complex<T>* v, std::size_t n) {
  if (n <= 8) {
    std::complex<T> s{};
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}
}  // namespace detail

template <class T>
std::complex<T> LaurentPolynomial::evaluate(std::span<const std::complex<T>> values) const {
  if (terms_.empty()) return {};
  std::size_t nv = ring_ ? ring_->size() : kMaxVars;
  if (values.size() < nv) throw Error("evaluate: too few values");
  Monomial lo = min_exponents(), hi = max_exponents();
  std::vector<std::vector<std::complex<T>>> pw(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    if (lo.e[v] == 0 && hi.e[v] == 0) continue;
    if (lo.e[v] < 0 && values[v] == std::complex<T>{}) throw ZeroImage("negative power of zero");
    pw[v].resize(hi.e[v] - lo.e[v] + 1);
    for (int e = lo.e[v]; e <= hi.e[v]; ++e) pw[v][e - lo.e[v]] = std::pow(values[v], e);
  }
  std::vector<std::complex<T>> acc;
  acc.reserve(terms_.size());
  for (auto& t : terms_) {
    std::complex<T> x(static_cast<T>(t.c.get_d()));
    for (std::size_t v = 0; v < nv; ++v)
      if (t.m.e[v]) x *= pw[v][t.m.e[v] - lo.e[v]];
    acc.push_back(x);
  }
  return detail::pairwise_sum(acc.data(), acc.size());
}

inline std::complex<double> evaluate_complex(const Poly& p, std::span<const std::complex<double>> v) {
  return p.evaluate<double>(v);
}

inline Poly pow(const Poly& p, int e) {
  if (e < 0) {
    if (!p.is_monomial()) throw Error("negative power of a non-monomial");
    auto& t = p.leading();
    Monomial m;
    for (std::size_t i = 0; i < kMaxVars; ++i) m.e[i] = static_cast<std::int16_t>(t.m.e[i] * e);
    m.deg = t.m.deg * e;
    return Poly::monomial(p.ring(), qpow(t.c, e), m);
  }
  Poly r(p.ring(), 1), b = p;
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

// Division in the Laurent ring.  Both sides are shifted so that every
// variable's minimum exponent is zero; a shifted divisor has no monomial
// factor, so Laurent divisibility reduces to ordinary polynomial division.
class ExactDivider {
 public:
  static std::optional<Poly> try_div(const Poly& a, const Poly& b, std::string* rem = nullptr) {
    RingPtr ring = Poly::common_ring(a, b);
    if (b.is_zero()) throw ZeroImage("division by zero");
    if (a.is_zero()) return Poly(ring);
    if (b.is_monomial()) return a.mul_monomial(1 / b.leading().c, Monomial{} / b.leading().m);
    Monomial ma = a.min_exponents(), mb = b.min_exponents();
    Poly bs = b.mul_monomial(1, Monomial{} / mb);
    // degree bounds give a cheap rejection
    Poly as = a.mul_monomial(1, Monomial{} / ma);
    Monomial ha = as.max_exponents(), hb = bs.max_exponents();
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (hb.e[i] > ha.e[i]) {
        if (rem) *rem = a.to_string();
        return std::nullopt;
      }
    if (!quick_check(as, bs)) {
      if (rem) *rem = a.to_string();
      return std::nullopt;
    }
    std::map<Monomial, mpq_class, GrlexFirst> r;
    for (auto& t : as.terms_) r.emplace(t.m, t.c);
    const Term& lb = bs.terms_.front();
    std::vector<Term> q;
    while (!r.empty()) {
      auto it = r.begin();
      if (!lb.m.divides(it->first)) {
        if (rem) {
          std::vector<Term> rt;
          for (auto& [m, c] : r) rt.push_back({m * ma, c});
          *rem = Poly::from_terms(ring, std::move(rt)).to_string();
        }
        return std::nullopt;
      }
      Monomial qm = it->first / lb.m;
      mpq_class qc = it->second / lb.c;
      for (auto& t : bs.terms_) {
        Monomial m = t.m * qm;
        auto [jt, ins] = r.try_emplace(m, 0);
        jt->second -= qc * t.c;
        if (jt->second == 0) r.erase(jt);
      }
      q.push_back({qm, qc});
    }
    Poly out(ring);
    out.terms_ = std::move(q);  // produced in decreasing order
    return out.mul_monomial(1, ma / mb);
  }

 private:
  // For a binomial v - g with v a bare variable absent from g, divisibility
  // is equivalent to vanishing under v -> g.
  static bool quick_check(const Poly& a, const Poly& b) {
    if (b.size() != 2) return true;
    for (int w = 0; w < 2; ++w) {
      const Term& t = b.terms_[w];
      const Term& o = b.terms_[1 - w];
      std::optional<std::size_t> var;
      bool ok = true;
      for (std::size_t i = 0; i < kMaxVars && ok; ++i) {
        if (t.m.e[i] == 0) continue;
        if (t.m.e[i] == 1 && !var && o.m.e[i] == 0) var = i;
        else ok = false;
      }
      if (!ok || !var) continue;
      // t.c * v + o.c * o.m = 0  =>  v = -(o.c / t.c) o.m
      mpq_class c = -o.c / t.c;
      std::vector<Term> img;
      img.reserve(a.size());
      for (auto& x : a.terms_) {
        int e = x.m.e[*var];
        Monomial m = x.m;
        m.set(*var, 0);
        Monomial om;
        for (std::size_t i = 0; i < kMaxVars; ++i) om.e[i] = static_cast<std::int16_t>(o.m.e[i] * e);
        om.deg = o.m.deg * e;
        img.push_back({m * om, x.c * qpow(c, e)});
      }
      return Poly::from_terms(a.ring(), std::move(img)).is_zero();
    }
    return true;
  }
};

inline std::optional<Poly> try_exact_div(const Poly& a, const Poly& b) { return ExactDivider::try_div(a, b); }

inline Poly exact_div(const Poly& a, const Poly& b) {
  std::string rem;
  auto q = ExactDivider::try_div(a, b, &rem);
  if (!q) throw NotDivisible("not divisible by " + b.to_string(), rem);
  return *q;
}

// Variable images that are single terms c * m in the target ring.
class MonomialMap {
 public:
  MonomialMap(RingPtr src, RingPtr dst) : src_(std::move(src)), dst_(std::move(dst)), img_(src_->size()) {
    for (std::size_t i = 0; i < src_->size(); ++i)
      if (auto j = dst_->find(src_->name(i))) {
        Monomial m;
        m.set(*j, 1);
        img_[i] = Term{m, 1};
      }
  }
  MonomialMap& set(std::string_view var, const mpq_class& c, const Monomial& m) {
    img_[src_->index(var)] = Term{m, c};
    return *this;
  }
  MonomialMap& set(std::string_view var, const Poly& image) {
    if (!image.is_monomial()) throw Error("image must be a single term");
    return set(var, image.leading().c, image.leading().m);
  }
  const RingPtr& source() const { return src_; }
  const RingPtr& target() const { return dst_; }
  const std::optional<Term>& image(std::size_t i) const { return img_[i]; }

 private:
  RingPtr src_, dst_;
  std::vector<std::optional<Term>> img_;
};

inline Poly substitute(const Poly& p, const MonomialMap& map) {
  std::vector<Term> out;
  out.reserve(p.size());
  std::size_t nv = map.source()->size();
  // coefficient powers by (variable, exponent); most images have coefficient +-1
  std::vector<int> unit(nv, 0);
  for (std::size_t v = 0; v < nv; ++v)
    if (auto& img = map.image(v)) unit[v] = img->c == 1 ? 1 : img->c == -1 ? -1 : 0;
  std::vector<std::map<int, mpq_class>> powers(nv);
  for (auto& t : p.terms()) {
    Monomial m;
    mpq_class c = t.c;
    bool neg = false;
    for (std::size_t v = 0; v < nv; ++v) {
      int e = t.m.e[v];
      if (!e) continue;
      auto& img = map.image(v);
      if (!img) throw Error("no image for variable " + map.source()->name(v));
      if (img->c == 0) throw ZeroImage("variable " + map.source()->name(v) + " maps to zero");
      if (unit[v] == -1) {
        if (e % 2) neg = !neg;
      } else if (unit[v] == 0) {
        auto it = powers[v].find(e);
        if (it == powers[v].end()) it = powers[v].emplace(e, qpow(img->c, e)).first;
        c *= it->second;
      }
      Monomial pm;
      for (std::size_t i = 0; i < kMaxVars; ++i) pm.e[i] = static_cast<std::int16_t>(img->m.e[i] * e);
      pm.deg = img->m.deg * e;
      m = m * pm;
    }
    if (neg) c = -c;
    out.push_back({m, std::move(c)});
  }
  return Poly::from_terms(map.target(), std::move(out), true);
}

// General polynomial images. Variables whose image is not a single term
// must occur with nonnegative exponents.
inline Poly substitute(const Poly& p, const RingPtr& dst, const std::vector<std::optional<Poly>>& images) {
  std::size_t nv = p.ring()->size();
  std::vector<std::map<int, Poly>> cache(nv);
  auto power = [&](std::size_t v, int e) -> const Poly& {
    auto it = cache[v].find(e);
    if (it != cache[v].end()) return it->second;
    const Poly& base = *images[v];
    Poly r = e < 0 ? pow(base, e) : base;
    for (int i = 1; i < e; ++i) r *= base;
    return cache[v].emplace(e, std::move(r)).first->second;
  };
  for (std::size_t v = 0; v < nv; ++v)
    if (p.involves(v) && (v >= images.size() || !images[v]))
      throw Error("no image for variable " + p.ring()->name(v));
  std::vector<Poly> parts;
  for (auto& t : p.terms()) {
    Poly x(dst, t.c);
    for (std::size_t v = 0; v < nv; ++v)
      if (t.m.e[v]) {
        if (images[v]->is_zero()) throw ZeroImage("variable maps to zero");
        x *= power(v, t.m.e[v]);
      }
    parts.push_back(std::move(x));
  }
  while (parts.size() > 1) {
    std::vector<Poly> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return parts.empty() ? Poly(dst) : parts[0];
}

// --------------------------------------------------------------------------

struct FactorLess {
  bool operator()(const Poly& a, const Poly& b) const { return structurally_less(a, b); }
};

// f = unit * canonical, canonical has min exponents 0 and leading coefficient 1
struct CanonicalFactor {
  Poly factor;  // zero-size if f is a unit
  mpq_class c;
  Monomial m;
};

inline CanonicalFactor canonical_factor(const Poly& f) {
  if (f.is_zero()) throw ZeroImage("zero denominator");
  Monomial lo = f.min_exponents();
  Poly g = f.mul_monomial(1, Monomial{} / lo);
  mpq_class c = g.leading().c;
  if (g.is_monomial()) return {Poly(f.ring()), c, lo};
  return {g * mpq_class(1 / c), c, lo};
}

class RationalFunction {
 public:
  using Factors = std::map<Poly, int, FactorLess>;

  RationalFunction() = default;
  RationalFunction(Poly num) : num_(std::move(num)) {}
  RationalFunction(Poly num, const Poly& den) : num_(std::move(num)) { divide_by(den, 1); }

  static RationalFunction with_factors(Poly num, const std::vector<Poly>& factors) {
    RationalFunction r(std::move(num));
    for (auto& f : factors) r.divide_by(f, 1);
    return r;
  }

  const Poly& numerator() const { return num_; }
  const Factors& factors() const { return den_; }
  RingPtr ring() const { return num_.ring(); }
  bool has_denominator() const { return !den_.empty(); }
  bool is_zero() const { return num_.is_zero(); }

  Poly denominator() const {
    Poly d(num_.ring(), 1);
    for (auto& [f, k] : den_) d *= pow(f, k);
    return d;
  }

  // cancel every factor that divides the numerator
  RationalFunction reduced() const {
    RationalFunction r = *this;
    if (r.num_.is_zero()) {
      r.den_.clear();
      return r;
    }
    for (auto it = r.den_.begin(); it != r.den_.end();) {
      while (it->second > 0) {
        auto q = try_exact_div(r.num_, it->first);
        if (!q) break;
        r.num_ = std::move(*q);
        --it->second;
      }
      it = it->second == 0 ? r.den_.erase(it) : std::next(it);
    }
    return r;
  }

  Poly to_polynomial() const {
    auto r = reduced();
    if (r.has_denominator()) throw NotPolynomial("denominator does not cancel: " + r.to_string());
    return r.num_;
  }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) { return add(a, b, false); }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return add(a, b, true); }
  RationalFunction& operator+=(const RationalFunction& b) { return *this = add(*this, b, false); }
  RationalFunction& operator-=(const RationalFunction& b) { return *this = add(*this, b, true); }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    RationalFunction r(a.num_ * b.num_);
    r.den_ = a.den_;
    for (auto& [f, k] : b.den_) r.den_[f] += k;
    if (r.num_.is_zero()) r.den_.clear();
    return r;
  }
  RationalFunction& operator*=(const RationalFunction& b) { return *this = *this * b; }

  void divide_by(const Poly& d, int mult) {
    if (d.is_zero()) throw ZeroImage("division by zero");
    if (num_.ring() == nullptr) num_ = Poly(d.ring());
    auto cf = canonical_factor(d);
    num_ = num_.mul_monomial(qpow(cf.c, -mult), Monomial{} / power_of(cf.m, mult));
    if (!cf.factor.is_zero() && !num_.is_zero()) den_[cf.factor] += mult;
  }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    // a.num * (L/a.den) == b.num * (L/b.den)
    Factors l = lcm(a.den_, b.den_);
    return a.num_ * cofactor(l, a.den_) == b.num_ * cofactor(l, b.den_);
  }

  std::string to_string() const {
    if (den_.empty()) return num_.to_string();
    std::string s = "(" + num_.to_string() + ") / (";
    bool first = true;
    for (auto& [f, k] : den_) {
      if (!first) s += " * ";
      first = false;
      s += "(" + f.to_string() + ")";
      if (k != 1) s += "^" + std::to_string(k);
    }
    return s + ")";
  }

  RationalFunction substitute(const MonomialMap& map) const {
    return substituted(kmono::substitute(num_, map), [&](const Poly& f) { return kmono::substitute(f, map); });
  }
  RationalFunction substitute(const RingPtr& dst, const std::vector<std::optional<Poly>>& images) const {
    return substituted(kmono::substitute(num_, dst, images),
                       [&](const Poly& f) { return kmono::substitute(f, dst, images); });
  }

  std::complex<double> evaluate(std::span<const std::complex<double>> v) const {
    std::complex<double> d = 1;
    for (auto& [f, k] : den_) d *= std::pow(f.evaluate<double>(v), k);
    return num_.evaluate<double>(v) / d;
  }

  static Factors lcm(const Factors& a, const Factors& b) {
    Factors l = a;
    for (auto& [f, k] : b) l[f] = std::max(l[f], k);
    return l;
  }
  // product of l / d, d dividing l factorwise
  static Poly cofactor(const Factors& l, const Factors& d) {
    Poly r;
    bool init = false;
    for (auto& [f, k] : l) {
      auto it = d.find(f);
      int e = k - (it == d.end() ? 0 : it->second);
      if (e <= 0) continue;
      Poly x = pow(f, e);
      r = init ? r * x : x;
      init = true;
    }
    if (!init) return Poly(l.empty() ? RingPtr{} : l.begin()->first.ring(), 1);
    return r;
  }

 private:
  static Monomial power_of(const Monomial& m, int k) {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) r.e[i] = static_cast<std::int16_t>(m.e[i] * k);
    r.deg = m.deg * k;
    return r;
  }
  // the units split off the image factors are collected and applied in one pass
  template <class F>
  RationalFunction substituted(Poly num, F&& sub) const {
    RationalFunction r(std::move(num));
    mpq_class c = 1;
    Monomial m;
    for (auto& [f, k] : den_) {
      Poly g = sub(f);
      if (g.is_zero()) throw ZeroImage("denominator factor vanishes under substitution");
      auto cf = canonical_factor(g);
      c *= qpow(cf.c, -k);
      m = m * (Monomial{} / power_of(cf.m, k));
      if (!cf.factor.is_zero()) r.den_[cf.factor] += k;
    }
    r.num_ = r.num_.mul_monomial(c, m);
    if (r.num_.is_zero()) r.den_.clear();
    return r;
  }

  static RationalFunction add(const RationalFunction& a, const RationalFunction& b, bool sub) {
    if (b.num_.is_zero() && b.num_.ring() == nullptr) return a;
    if (a.num_.is_zero() && a.num_.ring() == nullptr) return sub ? -b : b;
    Factors l = lcm(a.den_, b.den_);
    Poly x = a.num_ * with_ring(cofactor(l, a.den_), a.num_.ring());
    Poly y = b.num_ * with_ring(cofactor(l, b.den_), b.num_.ring());
    RationalFunction r(sub ? x - y : x + y);
    if (!r.num_.is_zero()) r.den_ = std::move(l);
    return r;
  }
  static Poly with_ring(Poly p, const RingPtr& r) {
    if (p.ring()) return p;
    return Poly(r, p.constant_value());
  }

  Poly num_;
  Factors den_;
};

using RatFun = RationalFunction;

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const RatFun& f) { return os << f.to_string(); }

// Sum over all permutations of the listed variables.
inline RationalFunction symmetrize(const RationalFunction& f, const std::vector<std::string>& vars,
                                   std::size_t cap = 6) {
  if (vars.size() > cap) throw TooManyVariables("symmetrization over more than " + std::to_string(cap) + " variables");
  RingPtr ring = f.ring();
  std::vector<std::size_t> idx;
  for (auto& v : vars) idx.push_back(ring->index(v));
  std::vector<std::size_t> perm(idx.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::vector<RationalFunction> terms;
  do {
    MonomialMap map(ring, ring);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      Monomial m;
      m.set(idx[perm[i]], 1);
      map.set(ring->name(idx[i]), 1, m);
    }
    terms.push_back(f.substitute(map));
  } while (std::next_permutation(perm.begin(), perm.end()));
  // one common denominator for all terms instead of pairwise ones
  RationalFunction::Factors l;
  for (auto& t : terms) l = RationalFunction::lcm(l, t.factors());
  std::vector<Poly> parts;
  for (auto& t : terms) {
    Poly c = RationalFunction::cofactor(l, t.factors());
    parts.push_back(c.ring() ? t.numerator() * c : t.numerator() * c.constant_value());
  }
  while (parts.size() > 1) {
    std::vector<Poly> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  std::vector<Poly> den;
  for (auto& [g, e] : l)
    for (int i = 0; i < e; ++i) den.push_back(g);
  return RationalFunction::with_factors(parts[0], den).reduced();
}

inline Poly symmetrize_to_polynomial(const RationalFunction& f, const std::vector<std::string>& vars) {
  auto r = symmetrize(f, vars);
  if (r.has_denominator()) throw SymmetrizationNotPolynomial("symmetrization left a denominator");
  return r.numerator();
}

inline constexpr std::size_t kMaxDet = 10;

// Fraction-free Gaussian elimination.
inline Poly det(std::vector<std::vector<Poly>> m) {
  std::size_t n = m.size();
  if (n > kMaxDet) throw SizeLimit("matrix larger than 10x10");
  for (auto& r : m)
    if (r.size() != n) throw Error("matrix not square");
  RingPtr ring;
  for (auto& r : m)
    for (auto& x : r)
      if (x.ring()) ring = x.ring();
  if (n == 0) return Poly(ring, 1);
  int sign = 1;
  Poly prev(ring, 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // smallest nonzero pivot keeps intermediate entries small
    std::size_t piv = n;
    for (std::size_t r = k; r < n; ++r)
      if (!m[r][k].is_zero() && (piv == n || m[r][k].size() < m[piv][k].size())) piv = r;
    if (piv == n) return Poly(ring);
    if (piv != k) {
      std::swap(m[piv], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Poly x = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = exact_div(x, prev);
      }
      m[i][k] = Poly(ring);
    }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

// Rows are cleared of denominators first, then divided back out.
inline RationalFunction det(const std::vector<std::vector<RationalFunction>>& m) {
  std::size_t n = m.size();
  if (n > kMaxDet) throw SizeLimit("matrix larger than 10x10");
  std::vector<std::vector<Poly>> p(n);
  RationalFunction::Factors all;
  RingPtr ring;
  for (auto& r : m)
    for (auto& x : r)
      if (x.ring()) ring = x.ring();
  for (std::size_t i = 0; i < n; ++i) {
    RationalFunction::Factors l;
    for (auto& x : m[i]) l = RationalFunction::lcm(l, x.factors());
    for (auto& x : m[i]) {
      Poly c = RationalFunction::cofactor(l, x.factors());
      if (!c.ring()) c = Poly(ring, 1);
      p[i].push_back(x.numerator().ring() ? x.numerator() * c : Poly(ring));
    }
    for (auto& [f, k] : l) all[f] += k;
  }
  RationalFunction r(det(std::move(p)));
  for (auto& [f, k] : all) r.divide_by(f, k);
  return r.reduced();
}

}  // namespace kmono
