#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kmono/schur.hpp"

namespace kmono {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// ---------------------------------------------------------------- Gamma

namespace detail {

inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log(sin x), stable for large |Im x|; defined modulo 2 pi i
inline cplx log_sin(cplx x) {
  if (x.imag() > 20) return -kI * x + std::log(cplx(0, 0.5)) + std::log(1.0 - std::exp(2.0 * kI * x));
  if (x.imag() < -20) return kI * x + std::log(cplx(0, -0.5)) + std::log(1.0 - std::exp(-2.0 * kI * x));
  return std::log(std::sin(x));
}

inline cplx log_gamma_right(cplx w) {
  w -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (w + static_cast<double>(i));
  cplx t = w + kLanczosG + 0.5;
  return 0.5 * std::log(2 * kPi) + (w + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace detail

inline bool near_integer(cplx w, double eps) {
  return std::abs(w - std::round(w.real())) < eps;
}

inline bool near_nonpositive_integer(cplx w, double eps) {
  return std::round(w.real()) <= 0 && near_integer(w, eps);
}

// log Gamma(w) modulo 2 pi i
inline cplx log_gamma(cplx w) {
  if (near_nonpositive_integer(w, 1e-12)) throw PoleError("Gamma pole at " + std::to_string(w.real()));
  if (w.real() < 0.5) return std::log(kPi) - detail::log_sin(kPi * w) - detail::log_gamma_right(1.0 - w);
  return detail::log_gamma_right(w);
}

inline cplx gamma_c(cplx w) {
  if (near_nonpositive_integer(w, 1e-12)) throw PoleError("Gamma pole at " + std::to_string(w.real()));
  if (w.real() < 0.5) return kPi / (std::sin(kPi * w) * std::exp(detail::log_gamma_right(1.0 - w)));
  return std::exp(detail::log_gamma_right(w));
}

// log(1 - e^w) modulo 2 pi i
inline cplx log1m_exp(cplx w) {
  if (w.real() < 0) return std::log(1.0 - std::exp(w));
  return w + std::log(std::exp(-w) - 1.0);
}

// ---------------------------------------------------------------- branches

// p on the sheet -2 pi < arg p < 0, moved by `winding` turns around 0.
class BranchedP {
 public:
  explicit BranchedP(cplx p, int winding = 0) : p_(p), w_(winding) {
    if (p.imag() == 0 && p.real() >= 0) throw DomainError("p must avoid the ray [0, inf)");
    arg_ = std::arg(p);
    if (arg_ >= 0) arg_ -= 2 * kPi;
  }
  cplx value() const { return p_; }
  int winding() const { return w_; }
  double arg() const { return arg_; }
  double abs() const { return std::abs(p_); }
  cplx log() const { return {std::log(std::abs(p_)), arg_ + 2 * kPi * w_}; }
  cplx pow(cplx s) const { return std::exp(s * log()); }
  BranchedP wound(int dw) const { return BranchedP(p_, w_ + dw); }

 private:
  cplx p_;
  int w_;
  double arg_;
};

// ---------------------------------------------------------------- parameters

class ParameterPoint {
 public:
  ParameterPoint(std::vector<cplx> z, cplx h, double eps = 1e-6) : z_(std::move(z)), h_(h) {
    const std::size_t n = z_.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        cplx d = z_[a] - z_[b];
        if (near_integer(d, eps)) in_L_ = false;
        if (near_nonpositive_integer(d - h_, eps)) in_L_ = in_Lp_ = false;
      }
    in_Lint_ = h_.real() < 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if ((z_[i] - z_[i + 1] + h_).real() <= 0) in_Lint_ = false;
  }
  const std::vector<cplx>& z() const { return z_; }
  cplx z(int a) const { return z_[a - 1]; }
  cplx h() const { return h_; }
  int n() const { return static_cast<int>(z_.size()); }
  bool in_L() const { return in_L_; }
  bool in_Lplus() const { return in_Lp_; }
  bool in_Lint() const { return in_Lint_; }
  // (z_sigma(1), ..., z_sigma(n))
  ParameterPoint permuted(const std::vector<int>& sigma) const {
    std::vector<cplx> zs;
    for (int s : sigma) zs.push_back(z_[s - 1]);
    return ParameterPoint(zs, h_);
  }

 private:
  std::vector<cplx> z_;
  cplx h_;
  bool in_L_ = true, in_Lp_ = true, in_Lint_ = true;
};

// Exponentiated values for the trigonometric ring: Z_a = e^{2 pi i z_a}, H = e^{2 pi i h}.
inline std::vector<cplx> exp_values(const TrigContext& c, const ParameterPoint& P) {
  std::vector<cplx> v(c.ring()->size(), 1.0);
  for (int a = 1; a <= c.n(); ++a) v[c.iZ(a)] = std::exp(2 * kPi * kI * P.z(a));
  v[c.iH()] = std::exp(2 * kPi * kI * P.h());
  return v;
}

// ---------------------------------------------------------------- cohomological data

// Polynomial with double coefficients and nonnegative exponents, for fast evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Poly& p) {
    std::size_t nv = p.ring()->size();
    maxe_.assign(nv, 0);
    for (auto& t : p.terms()) {
      Entry e{t.c.get_d(), {}};
      for (std::size_t v = 0; v < nv; ++v) {
        if (t.m.e[v] < 0) throw NotPolynomial("compiled polynomial needs nonnegative exponents");
        if (t.m.e[v]) {
          e.pw.push_back({static_cast<int>(v), t.m.e[v]});
          maxe_[v] = std::max(maxe_[v], static_cast<int>(t.m.e[v]));
        }
      }
      terms_.push_back(std::move(e));
    }
  }
  cplx operator()(const std::vector<cplx>& x) const {
    std::vector<std::vector<cplx>> pw(maxe_.size());
    for (std::size_t v = 0; v < maxe_.size(); ++v) {
      pw[v].resize(maxe_[v] + 1);
      pw[v][0] = 1.0;
      for (int e = 1; e <= maxe_[v]; ++e) pw[v][e] = pw[v][e - 1] * x[v];
    }
    std::vector<cplx> acc;
    acc.reserve(terms_.size());
    for (auto& t : terms_) {
      cplx y = t.c;
      for (auto [v, e] : t.pw) y *= pw[v][e];
      acc.push_back(y);
    }
    return acc.empty() ? cplx{} : detail::pairwise_sum(acc.data(), acc.size());
  }

 private:
  struct Entry {
    double c;
    std::vector<std::pair<int, int>> pw;
  };
  std::vector<Entry> terms_;
  std::vector<int> maxe_;
};

struct CohData {
  CohContext c;
  Poly w, q;
  CompiledPoly W, Q;
  int t_degree = 0;  // total degree of W in t
  std::vector<FixedPointIndex> points;
};

inline const CohData& coh_data(int k, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const CohData>> memo;
  {
    std::lock_guard lk(mu);
    auto it = memo.find({k, n});
    if (it != memo.end()) return *it->second;
  }
  CohContext c(k, n);
  Poly w = coh_weight(c), q = q_class(c);
  auto d = std::make_shared<CohData>(CohData{c, w, q, CompiledPoly(w), CompiledPoly(q), 0, subsets(k, n)});
  for (auto& t : w.terms()) {
    int s = 0;
    for (int i = 1; i <= k; ++i) s += t.m.e[c.it(i)];
    d->t_degree = std::max(d->t_degree, s);
  }
  std::lock_guard lk(mu);
  auto& slot = memo[{k, n}];
  if (!slot) slot = d;
  return *slot;
}

// Variable values for the cohomological ring at fixed point J (gamma -> z_J, gamma-bar -> z_J-bar).
inline std::vector<cplx> coh_values(const CohData& d, const std::vector<cplx>& t, const std::vector<cplx>& z,
                                    cplx h, const FixedPointIndex& J) {
  const CohContext& c = d.c;
  std::vector<cplx> v(c.ring()->size());
  for (int i = 1; i <= c.k(); ++i) {
    v[c.it(i)] = t[i - 1];
    v[c.ig(i)] = z[J[i - 1] - 1];
  }
  auto Jb = J.complement();
  for (int s = 1; s <= c.n() - c.k(); ++s) v[c.igb(s)] = z[Jb[s - 1] - 1];
  for (int a = 1; a <= c.n(); ++a) v[c.iz(a)] = z[a - 1];
  v[c.ih()] = h;
  return v;
}

inline std::vector<cplx> q_values(int k, const ParameterPoint& P) {
  const CohData& d = coh_data(k, P.n());
  std::vector<cplx> out;
  std::vector<cplx> t(k, 0.0);
  for (auto& J : d.points) out.push_back(d.Q(coh_values(d, t, P.z(), P.h(), J)));
  return out;
}

// ---------------------------------------------------------------- residue series

enum class Side { zero, inf };

inline const char* side_name(Side s) { return s == Side::zero ? "0" : "inf"; }

struct SolutionEvaluation {
  std::vector<FixedPointIndex> points;
  std::vector<cplx> values;
  Side side = Side::zero;
  int truncation_order = 0;
  double tail_estimate = 0;

  cplx at(const FixedPointIndex& J) const { return values[subset_rank(J)]; }
  double norm() const {
    double m = 0;
    for (auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

// Res at t = z_I + l (side zero) or t = z_I + h - l (side inf) of Phi_red * W,
// one value per fixed point J of the cohomology restriction.
inline std::vector<cplx> residue_term(const FixedPointIndex& I, const std::vector<int>& l, const ParameterPoint& P,
                                      Side side) {
  const int k = I.k(), n = I.n();
  if (!P.in_L()) throw DomainError("parameters outside L");
  const CohData& d = coh_data(k, n);
  const auto& z = P.z();
  const cplx h = P.h();
  std::vector<cplx> t(k);
  for (int i = 0; i < k; ++i)
    t[i] = side == Side::zero ? z[I[i] - 1] + static_cast<double>(l[i]) : z[I[i] - 1] + h - static_cast<double>(l[i]);
  std::vector<cplx> out(d.points.size());
  cplx lg = 0;
  double sign = 1;
  auto gam = [&](cplx w) {
    if (near_nonpositive_integer(w, 1e-10)) throw DomainError("Gamma factor on a pole");
    lg += log_gamma(w);
  };
  for (int i = 0; i < k; ++i) {
    const int a0 = I[i];
    lg += static_cast<double>(n) * kPi * kI * t[i];
    lg -= log_gamma(static_cast<double>(l[i]) + 1.0);
    if (side == Side::zero) {
      if ((l[i] + 1) % 2) sign = -sign;
    } else if (l[i] % 2) {
      sign = -sign;
    }
    for (int a = 1; a <= n; ++a) {
      if (side == Side::inf || a != a0) gam(z[a - 1] - t[i]);
      if (side == Side::zero || a != a0) gam(t[i] - z[a - 1] - h);
    }
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      cplx u = t[j] - t[i], v = 1.0 + t[i] - t[j] - h;
      if (near_nonpositive_integer(u, 1e-10) || near_nonpositive_integer(v, 1e-10)) return out;
      lg -= log_gamma(u) + log_gamma(v);
    }
  }
  cplx f = sign * std::exp(lg);
  for (std::size_t j = 0; j < d.points.size(); ++j) out[j] = f * d.W(coh_values(d, t, z, h, d.points[j]));
  return out;
}

struct SeriesOptions {
  double tol = 1e-12;  // relative to the largest component
  int max_order = 200;
  int min_order = 4;
  int fixed_order = -1;  // sum exactly the shells 0..fixed_order when >= 0
};

namespace detail {

inline void compositions(int s, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k - 1) {
    cur.push_back(s);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = s; a >= 0; --a) {
    cur.push_back(a);
    compositions(s - a, k, cur, out);
    cur.pop_back();
  }
}

inline double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

inline std::vector<std::vector<int>> shell(int s, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (k == 0) {
    if (s == 0) out.push_back({});
    return out;
  }
  detail::compositions(s, k, cur, out);
  return out;
}

// F^0_I (|p| < 1) or F^inf_I (|p| > 1), summed in shells sum(l) = s.
inline SolutionEvaluation f_series(const FixedPointIndex& I, const ParameterPoint& P, const BranchedP& p, Side side,
                                   const SeriesOptions& o = {}) {
  const int k = I.k(), n = I.n();
  if (P.n() != n) throw DomainError("z has the wrong length");
  if (!P.in_L()) throw DomainError("parameters outside L");
  double r = p.abs();
  if (std::abs(r - 1) < 0.05) throw NoConvergence("|p| too close to 1");
  if (side == Side::zero && r > 1) throw DomainError("zero side needs |p| < 1");
  if (side == Side::inf && r < 1) throw DomainError("inf side needs |p| > 1");
  const CohData& d = coh_data(k, n);
  const std::size_t m = d.points.size();
  cplx q = side == Side::zero ? p.value() : 1.0 / p.value();
  double aq = std::abs(q);
  cplx g = gamma_c(-P.h());
  cplx pre = std::pow(side == Side::zero ? -g : g, -k);
  double growth = std::max(0.0, k - 1 - k * P.h().real() * (n + 1 - k) + d.t_degree);

  SolutionEvaluation res;
  res.points = d.points;
  res.side = side;
  std::vector<cplx> total(m);
  double prev = 0;
  int last = o.fixed_order >= 0 ? o.fixed_order : o.max_order;
  for (int s = 0; s <= last; ++s) {
    auto ls = shell(s, k);
    std::vector<std::vector<cplx>> parts(m);
    for (auto& l : ls) {
      auto v = residue_term(I, l, P, side);
      for (std::size_t j = 0; j < m; ++j) parts[j].push_back(v[j]);
    }
    cplx qs = std::pow(q, s);
    std::vector<cplx> sh(m);
    for (std::size_t j = 0; j < m; ++j) {
      sh[j] = detail::pairwise_sum(parts[j].data(), parts[j].size()) * qs;
      total[j] += sh[j];
    }
    double cur = detail::max_abs(sh);
    res.truncation_order = s;
    if (o.fixed_order >= 0) {
      res.tail_estimate = cur;
      prev = cur;
      continue;
    }
    if (s >= o.min_order) {
      double ratio = aq * std::pow((s + k + 1.0) / (s + k), growth);
      if (ratio < 1) {
        double lead = std::max(cur, prev * aq);
        double tail = lead * ratio / (1 - ratio);
        double scale = detail::max_abs(total);
        if (tail <= o.tol * scale || scale == 0) {
          res.tail_estimate = tail;
          break;
        }
      }
    }
    prev = cur;
    if (s == last) throw NoConvergence("series did not converge by order " + std::to_string(last));
  }
  for (auto& v : total) v *= pre;
  res.tail_estimate *= std::abs(pre);
  res.values = total;
  return res;
}

// Psi^0_I = p^{sum z_I} F^0_I Q, Psi^inf_I = p^{kh + sum z_I} F^inf_I Q, restricted to fixed points.
inline SolutionEvaluation psi_point(const FixedPointIndex& I, const ParameterPoint& P, const BranchedP& p, Side side,
                                    const SeriesOptions& o = {}) {
  auto F = f_series(I, P, p, side, o);
  cplx S = side == Side::zero ? 0.0 : static_cast<double>(I.k()) * P.h();
  for (int a : I.elements()) S += P.z(a);
  cplx f = p.pow(S);
  auto q = q_values(I.k(), P);
  double qm = 0;
  for (std::size_t j = 0; j < F.values.size(); ++j) {
    F.values[j] *= f * q[j];
    qm = std::max(qm, std::abs(q[j]));
  }
  F.tail_estimate *= std::abs(f) * qm;
  return F;
}

// sum_I coeff_I Psi_I
inline SolutionEvaluation psi_combination(int k, const std::vector<cplx>& coeff, const ParameterPoint& P,
                                          const BranchedP& p, Side side, const SeriesOptions& o = {}) {
  auto pts = subsets(k, P.n());
  SolutionEvaluation res;
  res.points = pts;
  res.side = side;
  res.values.assign(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (coeff[i] == 0.0) continue;
    auto v = psi_point(pts[i], P, p, side, o);
    for (std::size_t j = 0; j < pts.size(); ++j) res.values[j] += coeff[i] * v.values[j];
    res.truncation_order = std::max(res.truncation_order, v.truncation_order);
    res.tail_estimate += std::abs(coeff[i]) * v.tail_estimate;
  }
  return res;
}

// Restrictions of x with Z, H exponentiated.
inline std::vector<cplx> exponentiated_restrictions(const KTheoryClass& x, const ParameterPoint& P) {
  auto v = exp_values(x.context(), P);
  std::vector<cplx> c;
  for (auto& r : x.restrictions()) c.push_back(r.is_zero() ? cplx{} : evaluate_complex(r, v));
  return c;
}

inline SolutionEvaluation psi_of_class(const KTheoryClass& x, const ParameterPoint& P, const BranchedP& p, Side side,
                                       const SeriesOptions& o = {}) {
  return psi_combination(x.k(), exponentiated_restrictions(x, P), P, p, side, o);
}

// ---------------------------------------------------------------- quadrature

namespace detail {

inline constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                             0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                             0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                             0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                             0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                             0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                             0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using VecFn = std::function<std::vector<cplx>(double)>;

struct Segment {
  std::vector<cplx> k, g;
  double edge = 0;  // largest integrand component at the outer end
};

inline Segment gk15(const VecFn& f, double a, double b, std::size_t m, long& evals) {
  double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  Segment s{std::vector<cplx>(m), std::vector<cplx>(m), 0};
  for (int i = 0; i < 8; ++i) {
    auto add = [&](const std::vector<cplx>& y, int gi) {
      for (std::size_t j = 0; j < m; ++j) {
        s.k[j] += kWgk[i] * y[j];
        if (gi >= 0) s.g[j] += kWg[gi] * y[j];
      }
    };
    int gi = i % 2 ? i / 2 : -1;
    if (i == 7) {
      add(f(c), 3);
      ++evals;
    } else {
      add(f(c - hl * kXgk[i]), gi);
      add(f(c + hl * kXgk[i]), gi);
      evals += 2;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    s.k[j] *= hl;
    s.g[j] *= hl;
  }
  return s;
}

inline std::vector<cplx> refine(const VecFn& f, double a, double b, std::size_t m, const Segment& s,
                                const std::vector<double>& atol, int depth, long& evals, bool& ok) {
  bool good = true;
  for (std::size_t j = 0; j < m; ++j)
    if (std::abs(s.k[j] - s.g[j]) > atol[j] * (b - a)) good = false;
  if (good) return s.k;
  if (depth >= 24) {
    ok = false;
    return s.k;
  }
  double c = 0.5 * (a + b);
  auto l = gk15(f, a, c, m, evals), r = gk15(f, c, b, m, evals);
  auto x = refine(f, a, c, m, l, atol, depth + 1, evals, ok);
  auto y = refine(f, c, b, m, r, atol, depth + 1, evals, ok);
  for (std::size_t j = 0; j < m; ++j) x[j] += y[j];
  return x;
}

struct LineResult {
  std::vector<cplx> value;
  double reach = 0;
  long evals = 0;
};

// Integral of f over the real line, in unit segments outward from `center`.
// With cutoff > 0 the range is exactly [center - cutoff, center + cutoff];
// otherwise it grows until the segments and the integrand have decayed.
inline LineResult integrate_line(const VecFn& f, std::size_t m, double center, double tol, double cutoff,
                                 double max_reach = 400) {
  LineResult res;
  std::vector<std::pair<double, double>> spans;
  std::vector<Segment> segs;
  std::vector<double> absum(m, 0.0), peak(m, 0.0);
  for (int dir : {1, -1}) {
    for (int i = 0;; ++i) {
      double a = center + dir * i, b = center + dir * (i + 1);
      if (cutoff > 0 && i >= std::ceil(cutoff - 1e-12)) break;
      if (cutoff > 0 && i + 1 > cutoff) b = center + dir * cutoff;
      if (i >= max_reach) throw NoConvergence("contour integrand does not decay");
      auto lo = std::min(a, b), hi = std::max(a, b);
      Segment s = gk15(f, lo, hi, m, res.evals);
      auto e = f(b);
      ++res.evals;
      bool small = i >= 2;
      for (std::size_t j = 0; j < m; ++j) {
        double v = std::abs(s.k[j]);
        absum[j] += v;
        peak[j] = std::max(peak[j], std::abs(e[j]));
        if (v > 1e-3 * tol * absum[j] || std::abs(e[j]) > 1e-3 * tol * peak[j]) small = false;
      }
      spans.push_back({lo, hi});
      segs.push_back(std::move(s));
      res.reach = std::max(res.reach, std::abs(b - center));
      if (cutoff <= 0 && small) break;
    }
  }
  std::vector<cplx> coarse(m);
  for (auto& s : segs)
    for (std::size_t j = 0; j < m; ++j) coarse[j] += s.k[j];
  double len = 0;
  for (auto& [a, b] : spans) len += b - a;
  std::vector<double> atol(m);
  double big = 0;
  for (std::size_t j = 0; j < m; ++j) big = std::max(big, std::abs(coarse[j]));
  for (std::size_t j = 0; j < m; ++j)
    atol[j] = 0.1 * tol * std::max({std::abs(coarse[j]), 1e-8 * absum[j], 1e-12 * big}) / std::max(len, 1.0);
  bool ok = true;
  res.value.assign(m, 0.0);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    auto v = refine(f, spans[i].first, spans[i].second, m, segs[i], atol, 0, res.evals, ok);
    for (std::size_t j = 0; j < m; ++j) res.value[j] += v[j];
  }
  if (!ok) throw NoConvergence("adaptive quadrature hit its depth limit");
  return res;
}

}  // namespace detail

// log of p^{sum t} U Phi_red / E on the contour; W is applied separately.
inline cplx log_mb_kernel(const std::vector<cplx>& t, const ParameterPoint& P, const BranchedP& p) {
  const int k = static_cast<int>(t.size()), n = P.n();
  const auto& z = P.z();
  const cplx h = P.h(), tpi = 2 * kPi * kI;
  cplx lg = 0;
  for (int i = 0; i < k; ++i) {
    lg += t[i] * p.log() + static_cast<double>(n) * kPi * kI * t[i];
    for (int a = 0; a < n; ++a) lg += log_gamma(z[a] - t[i]) + log_gamma(t[i] - z[a] - h);
    for (int j = 0; j < k; ++j)
      if (j != i) {
        lg -= log_gamma(t[j] - t[i]) + log_gamma(1.0 + t[i] - t[j] - h);
        lg -= log1m_exp(tpi * (h + t[i] - t[j]));
      }
    // exponentiated U, then the extra factors (1 - Z_a / T_i), a > k
    for (int a = 0; a < i; ++a) lg += log1m_exp(tpi * (h + z[a] - t[i]));
    for (int b = i + 1; b < k; ++b) lg += log1m_exp(tpi * (z[b] - t[i]));
    for (int j = i + 1; j < k; ++j) lg += log1m_exp(tpi * (h + t[j] - t[i])) - log1m_exp(tpi * (t[j] - t[i]));
    for (int a = k; a < n; ++a) lg += log1m_exp(tpi * (z[a] - t[i]));
  }
  return lg;
}

struct MBOptions {
  double tol = 1e-10;
  double cutoff = 0;  // half-length of each vertical line; 0 chooses it from the decay
  std::optional<std::vector<cplx>> restriction_z;  // z used for gamma -> z_J; defaults to P.z()
};

struct MBResult {
  std::vector<FixedPointIndex> points;
  std::vector<cplx> values;
  double cutoff = 0;
  long evaluations = 0;
  cplx at(const FixedPointIndex& J) const { return values[subset_rank(J)]; }
};

// (2 pi i)^{-k} integral over Re t_i = Re(z_i + h/2) of p^{sum t} U Phi_red W / E, per fixed point.
inline MBResult mellin_barnes(int k, const ParameterPoint& P, const BranchedP& p, const MBOptions& o = {}) {
  const int n = P.n();
  if (k < 1 || k > 2 || k > n) throw DomainError("integral representation needs 1 <= k <= min(2, n)");
  if (!P.in_Lint()) throw DomainError("parameters outside L^int");
  const CohData& d = coh_data(k, n);
  const std::size_t m = d.points.size();
  const std::vector<cplx>& zr = o.restriction_z ? *o.restriction_z : P.z();
  std::vector<cplx> base(k);
  for (int i = 0; i < k; ++i) base[i] = P.z()[i] + 0.5 * P.h();
  auto integrand = [&](const std::vector<cplx>& t) {
    cplx e = std::exp(log_mb_kernel(t, P, p));
    std::vector<cplx> v(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = e * d.W(coh_values(d, t, zr, P.h(), d.points[j]));
    return v;
  };
  MBResult res;
  res.points = d.points;
  detail::LineResult lr;
  if (k == 1) {
    lr = detail::integrate_line([&](double y) { return integrand({base[0] + kI * y}); }, m, 0.0, o.tol, o.cutoff);
  } else {
    long inner_evals = 0;
    double inner_reach = 0;
    auto outer = [&](double y1) {
      cplx t1 = base[0] + kI * y1;
      auto r = detail::integrate_line([&](double y2) { return integrand({t1, base[1] + kI * y2}); }, m, 0.5 * y1,
                                      0.1 * o.tol, o.cutoff);
      inner_evals += r.evals;
      inner_reach = std::max(inner_reach, r.reach);
      return r.value;
    };
    lr = detail::integrate_line(outer, m, 0.0, o.tol, o.cutoff);
    lr.evals += inner_evals;
    lr.reach = std::max(lr.reach, inner_reach);
  }
  double scale = std::pow(2 * kPi, -k);
  for (auto& v : lr.value) v *= scale;
  res.values = lr.value;
  res.cutoff = lr.reach;
  res.evaluations = lr.evals;
  return res;
}

// ---------------------------------------------------------------- checks

struct NumericCheck {
  bool pass = true;
  double max_err = 0;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;

  void record(double err, double tol, const std::string& what) {
    if (!(err <= tol)) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what + " deviation " + std::to_string(err);
    }
    if (std::isnan(err) || err > max_err) max_err = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
  }
};

inline double rel_dev(cplx a, cplx b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0 : std::abs(a - b) / s;
}

struct Thm52Result {
  NumericCheck check;
  std::vector<cplx> integral_side, series_side;
  Side side = Side::zero;
};

// Psi^int(z_sigma) against Gamma(-h)^k Psi^0_{Y^0_sigma} (|p| < 1) or Gamma(-h)^k Psi^inf_{Y^inf_sigma} (|p| > 1).
inline Thm52Result thm52_check(int k, const std::vector<int>& sigma, const ParameterPoint& P, const BranchedP& p,
                               double tol, const MBOptions& mb = {}, const SeriesOptions& so = {}) {
  const int n = P.n();
  const TrigContext& c = trig_context(k, n);
  ParameterPoint Ps = P.permuted(sigma);
  MBOptions o = mb;
  o.restriction_z = P.z();
  auto I = mellin_barnes(k, Ps, p, o);
  auto q = q_values(k, P);
  Thm52Result r;
  r.side = p.abs() < 1 ? Side::zero : Side::inf;
  Poly w = trig_weight_zero(c, sigma);
  KTheoryClass Y = r.side == Side::zero ? pi_zero(c, w) : pi_inf(c, w);
  auto s = psi_of_class(Y, P, p, r.side, so);
  cplx g = std::pow(gamma_c(-P.h()), k);
  for (std::size_t j = 0; j < q.size(); ++j) {
    r.integral_side.push_back(I.values[j] * q[j]);
    r.series_side.push_back(g * s.values[j]);
    r.check.record(rel_dev(r.integral_side[j], r.series_side[j]), tol, "component " + I.points[j].to_json());
  }
  r.check.metrics.push_back({"cutoff", I.cutoff});
  r.check.metrics.push_back({"truncation_order", s.truncation_order});
  return r;
}

// Rows: fixed-point values of Psi_{V_I(Gamma)}; columns of the result: coefficients on V_J(gamma).
inline Eigen::MatrixXcd solution_matrix(int k, const ParameterPoint& P, const BranchedP& p, Side side,
                                        const SeriesOptions& so = {}) {
  const int n = P.n();
  const TrigContext& c = trig_context(k, n);
  auto pts = subsets(k, n);
  const auto N = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXcd psi(N, N), B(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    auto v = psi_of_class(schur_class(c, pts[i]), P, p, side, so);
    for (Eigen::Index j = 0; j < N; ++j) psi(i, j) = v.values[j];
  }
  const RingPtr& xr = x_ring(n);
  for (Eigen::Index j = 0; j < N; ++j) {
    CompiledPoly v(schur_V(pts[j]));
    for (Eigen::Index l = 0; l < N; ++l) {
      std::vector<cplx> x(xr->size(), 0.0);
      for (int a = 0; a < k; ++a) x[a] = P.z(pts[l][a]);
      B(j, l) = v(x);
    }
  }
  // closed-form basis determinant at z, as a guard
  std::vector<cplx> zv(P.z().begin(), P.z().end());
  zv.resize(xr->size(), 0.0);
  cplx dB = CompiledPoly(schur_basis_det_closed_form(k, n))(zv);
  if (std::abs(dB) < 1e-12 || rel_dev(B.determinant(), dB) > 1e-8) throw SingularBasis("Schur basis is degenerate at z");
  // psi = M B
  return B.transpose().partialPivLu().solve(psi.transpose()).transpose();
}

struct DetMResult {
  NumericCheck check;
  cplx det_zero, det_inf, rhs_zero, ratio, detmf, detmf_expected;
  cplx alpha_fit;
  cplx observed_factor;  // prod_J Q|_J exp(i pi c sum z), see detM_check
  double alpha_literal = 0, alpha_alternative = 0;
  std::string exponent_match;
};

// det M^0 against its closed form with the p-exponent fitted from two values of p,
// and det M^inf / det M^0 against exp(pi i h k (n-1) C(n,k)).
inline DetMResult detM_check(int k, const ParameterPoint& P, const BranchedP& p0, const BranchedP& pinf, double tol,
                             const SeriesOptions& so = {}) {
  const int n = P.n();
  if (!P.in_Lplus() || !P.in_L()) throw DomainError("parameters outside L+");
  if (p0.abs() > 0.5) throw DomainError("zero side needs |p| <= 0.5");
  const long C = binomial(n, k), C1 = binomial(n - 1, k - 1), C2 = n >= 2 ? binomial(n - 2, k - 1) : 0;
  cplx sz = 0;
  for (auto& z : P.z()) sz += z;
  const cplx h = P.h();
  const cplx beta = h * static_cast<double>(k * C);
  auto rest = [&](const BranchedP& p, cplx alpha) {
    cplx v = std::pow(2 * kPi * kI, static_cast<int>(n * (n - 1) / 2 * C2));
    v *= p.pow(alpha) * std::pow(1.0 - p.value(), beta);
    v *= std::exp(3 * kPi * kI * static_cast<double>(k * C1) * sz);
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b)
        if (a != b) v *= std::pow(gamma_c(P.z(a) - P.z(b) - h), static_cast<int>(C2));
    return v;
  };
  DetMResult r;
  r.alpha_literal = (static_cast<double>(k * C) * sz).real();
  r.alpha_alternative = (static_cast<double>(C1) * sz).real();
  BranchedP p1(p0.value() * 0.5, p0.winding());
  r.det_zero = solution_matrix(k, P, p0, Side::zero, so).determinant();
  cplx d1 = solution_matrix(k, P, p1, Side::zero, so).determinant();
  cplx num = std::log((r.det_zero / std::pow(1.0 - p0.value(), beta)) / (d1 / std::pow(1.0 - p1.value(), beta)));
  r.alpha_fit = num / (p0.log() - p1.log());
  double dl = std::abs(r.alpha_fit - cplx(r.alpha_literal, (static_cast<double>(k * C) * sz).imag()));
  double da = std::abs(r.alpha_fit - cplx(r.alpha_alternative, (static_cast<double>(C1) * sz).imag()));
  double et = 1e-6 * std::max(1.0, std::abs(r.alpha_fit));
  r.exponent_match = dl < et && da < et ? "both" : dl < et ? "literal" : da < et ? "alternative" : "neither";
  r.rhs_zero = rest(p0, r.alpha_fit);
  r.ratio = r.det_zero / r.rhs_zero;
  r.det_inf = solution_matrix(k, P, pinf, Side::inf, so).determinant();
  r.detmf = (r.det_inf / rest(pinf, r.alpha_fit)) / r.ratio;
  r.detmf_expected = std::exp(kPi * kI * h * static_cast<double>(k * (n - 1) * C));
  // Observed shape of the ratio: the restricted Q classes and a phase e^{i pi c sum z}.
  const double cph = static_cast<double>(n * C1 + (n - 1) * C2 - 3 * k * C1);
  r.observed_factor = std::exp(kPi * kI * cph * sz);
  for (auto& x : q_values(k, P)) r.observed_factor *= x;
  r.check.record(std::abs(r.ratio - 1.0), tol, "det M0 ratio");
  r.check.record(std::abs(r.detmf / r.detmf_expected - 1.0), tol, "det Minf / det M0");
  r.check.metrics.push_back({"ratio_re", r.ratio.real()});
  r.check.metrics.push_back({"ratio_im", r.ratio.imag()});
  r.check.metrics.push_back({"ratio_abs", std::abs(r.ratio)});
  r.check.metrics.push_back({"alpha_fit_re", r.alpha_fit.real()});
  r.check.metrics.push_back({"alpha_fit_im", r.alpha_fit.imag()});
  r.check.metrics.push_back({"alpha_literal", r.alpha_literal});
  r.check.metrics.push_back({"ratio_vs_observed_factor", std::abs(r.ratio / r.observed_factor - 1.0)});
  r.check.metrics.push_back({"alpha_alternative", r.alpha_alternative});
  r.check.metrics.push_back({"detmf_dev", std::abs(r.detmf / r.detmf_expected - 1.0)});
  return r;
}

// Winding covariance of Psi_I on both sides, and mu^0 Psi^0_{V_I} = sum_J M(e^{2 pi i z})_{IJ} Psi^0_{V_J}.
inline NumericCheck monodromy_numeric_check(int k, const ParameterPoint& P, const BranchedP& p0, const BranchedP& pinf,
                                            double tol_winding, double tol_matrix, const SeriesOptions& so = {}) {
  const int n = P.n();
  if (!P.in_Lplus() || !P.in_L()) throw DomainError("parameters outside L+");
  NumericCheck res;
  auto pts = subsets(k, n);
  for (Side side : {Side::zero, Side::inf}) {
    const BranchedP& p = side == Side::zero ? p0 : pinf;
    for (auto& I : pts) {
      cplx S = side == Side::zero ? 0.0 : static_cast<double>(k) * P.h();
      for (int a : I.elements()) S += P.z(a);
      auto base = psi_point(I, P, p, side, so);
      for (int w : {-1, 1, 2}) {
        auto moved = psi_point(I, P, p.wound(w), side, so);
        cplx f = std::exp(2 * kPi * kI * static_cast<double>(w) * S);
        for (std::size_t j = 0; j < pts.size(); ++j)
          res.record(rel_dev(moved.values[j], base.values[j] * f), tol_winding,
                     std::string("winding ") + std::to_string(w) + " side " + side_name(side) + " I=" + I.to_json());
      }
    }
  }
  const TrigContext& c = trig_context(k, n);
  auto M = m_matrix(c);
  auto ev = exp_values(c, P);
  std::vector<SolutionEvaluation> rows;
  for (auto& I : pts) rows.push_back(psi_of_class(schur_class(c, I), P, p0, Side::zero, so));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto lhs = psi_of_class(schur_class(c, pts[i]), P, p0.wound(1), Side::zero, so);
    for (std::size_t l = 0; l < pts.size(); ++l) {
      cplx rhs = 0;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (!M[i][j].is_zero()) rhs += evaluate_complex(M[i][j], ev) * rows[j].values[l];
      res.record(rel_dev(lhs.values[l], rhs), tol_matrix, "mu0 on V" + pts[i].to_json() + " at " + pts[l].to_json());
    }
  }
  return res;
}

}  // namespace kmono
