#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "kmono/analytic.hpp"

namespace kmono::suite {

using json = nlohmann::json;

// ---------------------------------------------------------------- sampling

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a, double b) { return a + (b - a) * static_cast<double>(g_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 g_;
};

// A point of L^int (for the identity permutation) that also lies in L and L+.
inline ParameterPoint sample_lint(int n, Rng& r) {
  for (;;) {
    cplx h(-r.uniform(0.5, 1.5), r.uniform(-0.1, 0.1));
    std::vector<cplx> z;
    double re = r.uniform(-0.5, 0.5);
    for (int a = 0; a < n; ++a) {
      if (a) re -= -h.real() + r.uniform(0.3, 0.7);
      z.push_back({re, r.uniform(-0.1, 0.1)});
    }
    ParameterPoint P(z, h);
    if (P.in_L() && P.in_Lplus() && P.in_Lint()) return P;
  }
}

inline ParameterPoint sample_single(Rng& r) {
  for (;;) {
    ParameterPoint P({cplx(r.uniform(-1, 1), r.uniform(-0.3, 0.3))}, cplx(r.uniform(-1.5, 1.5), r.uniform(-0.3, 0.3)));
    if (!near_integer(P.h(), 0.05)) return P;
  }
}

inline MBOptions mb_options(double tol, double cutoff = 0) {
  MBOptions o;
  o.tol = tol;
  o.cutoff = cutoff;
  return o;
}

inline json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

inline json to_json(const ParameterPoint& P) {
  json z = json::array();
  for (auto& x : P.z()) z.push_back(to_json(x));
  return {{"z", z}, {"h", to_json(P.h())}};
}

// ---------------------------------------------------------------- checks

struct Outcome {
  bool pass = true;
  bool exact = true;
  double max_err = 0;
  std::string detail;
  json metrics = json::object();
};

struct Check {
  std::string name;
  json parameters;
  std::function<Outcome()> run;
};

inline Outcome from_symbolic(const SymbolicCheck& c) { return {c.pass, true, 0, c.detail, json::object()}; }

inline Outcome from_numeric(const NumericCheck& c) {
  Outcome o{c.pass, false, c.max_err, c.detail, json::object()};
  for (auto& [k, v] : c.metrics) o.metrics[k] = v;
  return o;
}

inline std::string kn_name(int k, int n) { return "k" + std::to_string(k) + "n" + std::to_string(n); }

namespace sym {

inline Poly swap_z(const TrigContext& c, const Poly& p, int a, int b) {
  auto s = identity_permutation(c.n());
  std::swap(s[a - 1], s[b - 1]);
  return substitute(p, c.z_permutation(s));
}

inline std::vector<std::vector<int>> perms(int n, bool all) {
  std::vector<std::vector<int>> out;
  auto p = identity_permutation(n);
  if (!all) {
    out.push_back(p);
    std::reverse(p.begin(), p.end());
    out.push_back(p);
    std::vector<int> cyc;
    for (int a = 2; a <= n; ++a) cyc.push_back(a);
    cyc.push_back(1);
    out.push_back(cyc);
    return out;
  }
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline SymbolicCheck z_symmetry(const TrigContext& c) {
  SymbolicCheck r;
  const int k = c.k(), n = c.n();
  std::vector<std::pair<std::string, Poly>> ws{
      {"reduced", trig_weight_reduced(c)}, {"W0", trig_weight_zero(c)}, {"Winf", trig_weight_inf(c)}};
  for (auto& [nm, w] : ws) {
    for (int a = 1; a < k; ++a)
      if (!(swap_z(c, w, a, a + 1) == w)) r.fail(nm + " not symmetric in Z" + std::to_string(a) + ",Z" + std::to_string(a + 1));
    for (int a = k + 1; a < n; ++a)
      if (!(swap_z(c, w, a, a + 1) == w)) r.fail(nm + " not symmetric in Z" + std::to_string(a) + ",Z" + std::to_string(a + 1));
  }
  return r;
}

inline std::string perm_str(const std::vector<int>& s) {
  std::string o;
  for (int x : s) o += (o.empty() ? "" : ",") + std::to_string(x);
  return "(" + o + ")";
}

inline SymbolicCheck membership(const TrigContext& c, bool all) {
  SymbolicCheck r;
  for (auto& s : perms(c.n(), all)) {
    if (!membership_P(c, trig_weight_zero(c, s))) r.fail("W0 not in P for sigma " + perm_str(s));
    if (!membership_P(c, trig_weight_inf(c, s))) r.fail("Winf not in P for sigma " + perm_str(s));
  }
  return r;
}

inline SymbolicCheck evaluation(const TrigContext& c) {
  SymbolicCheck r;
  auto pts = subsets(c.k(), c.n());
  for (auto& J : pts) {
    auto s = J.sigma();
    Poly rhs = e_at(c, J) * r_mult(c, s);
    Poly w0 = trig_weight_zero(c, s), wi = trig_weight_inf(c, s);
    for (auto& I : pts) {
      Poly a = eval_at_fixed_point(c, w0, I, false), b = eval_at_fixed_point(c, wi, I, true);
      Poly ea = I == J ? a - rhs : a, eb = I == J ? b - rhs : b;
      if (!ea.is_zero()) r.fail("W0 at " + I.to_json() + " for J=" + J.to_json() + ": diff " + ea.to_string());
      if (!eb.is_zero()) r.fail("Winf at " + I.to_json() + " for J=" + J.to_json() + ": diff " + eb.to_string());
    }
  }
  return r;
}

inline SymbolicCheck lift(const TrigContext& c, int samples) {
  SymbolicCheck r;
  for (int s = 1; s <= samples; ++s) {
    auto x = random_class(c, 1000 * c.n() + 100 * c.k() + s);
    if (!is_admissible(x)) r.fail("random class not admissible");
    auto w0 = weight_of_class(x, false), wi = weight_of_class(x, true);
    if (!membership_P(c, w0) || !membership_P(c, wi)) r.fail("weight of class not in P");
    if (!(pi_zero(c, w0) == x)) r.fail("pi0 of the zero-side lift differs from the class");
    if (!(pi_inf(c, wi) == x)) r.fail("pi_inf of the inf-side lift differs from the class");
    if (!(tau_inv_apply(tau_apply(x)) == x)) r.fail("tau^-1 tau differs from the identity");
  }
  return r;
}

inline SymbolicCheck tau_det_full(const TrigContext& c) {
  SymbolicCheck r;
  RatFun d = tau_det(c), want(c.H(static_cast<int>(tau_det_exponent(c.k(), c.n()))));
  if (!(d == want)) r.fail("det tau = " + d.to_string() + ", expected " + want.to_string());
  return r;
}

inline SymbolicCheck tau_det_spot(const TrigContext& c) {
  SymbolicCheck r;
  const std::vector<std::vector<mpq_class>> pts{
      {mpq_class(2), mpq_class(-3, 2), mpq_class(5, 3), mpq_class(7), mpq_class(-1, 4)},
      {mpq_class(-5), mpq_class(4, 7), mpq_class(3), mpq_class(-2, 9), mpq_class(11, 2)}};
  long e = tau_det_exponent(c.k(), c.n());
  for (auto& z : pts) {
    Poly d = tau_det_specialized(c, z, false), di = tau_det_specialized(c, z, true);
    if (!(d == c.H(static_cast<int>(e)))) r.fail("det tau at rational Z: " + d.to_string());
    if (!(di == c.H(static_cast<int>(-e)))) r.fail("det tau^-1 at rational Z: " + di.to_string());
  }
  return r;
}

inline SymbolicCheck integrality(const TrigContext& c) {
  SymbolicCheck r;
  try {
    auto M = m_matrix(c);
    auto T = t_matrix(c);
    auto Ti = t_inv_matrix(c);
    auto one = identity_matrix(c.ring(), T.size());
    if (!(matmul(T, Ti) == one)) r.fail("T Tinv differs from the identity");
    if (!(matmul(Ti, T) == one)) r.fail("Tinv T differs from the identity");
  } catch (const IntegralityViolation& e) {
    r.fail(e.what());
  }
  return r;
}

inline SymbolicCheck schur_det(int k, int n) {
  SymbolicCheck r;
  if (binomial(n, k) <= 6) {
    Poly d = schur_basis_det(k, n), want = schur_basis_det_closed_form(k, n);
    if (!(d == want)) r.fail("basis determinant differs: " + (d - want).to_string());
    return r;
  }
  const RingPtr& xr = x_ring(n);
  const std::vector<std::vector<mpq_class>> pts{{mpq_class(3), mpq_class(-2, 5), mpq_class(7, 3), mpq_class(11)},
                                                {mpq_class(-4), mpq_class(1, 2), mpq_class(9), mpq_class(-13, 7)}};
  for (auto& v : pts) {
    MonomialMap sp(xr, xr);
    for (int a = 1; a < n; ++a) sp.set(xr->name(a - 1), v[a - 1], Monomial{});
    Poly d = schur_basis_det_specialized(k, n, v), want = substitute(schur_basis_det_closed_form(k, n), sp);
    if (!(d == want)) r.fail("specialized basis determinant differs: " + (d - want).to_string());
  }
  return r;
}

inline SymbolicCheck round_trip(const TrigContext& c) {
  SymbolicCheck r;
  auto pts = subsets(c.k(), c.n());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    auto v = expand_in_schur(schur_class(c, pts[j]));
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (!(v[i] == Poly(c.ring(), i == j ? 1 : 0))) r.fail("expansion of V" + pts[j].to_json() + " is not a unit vector");
  }
  for (std::uint64_t s = 1; s <= 2; ++s) {
    auto x = random_class(c, 77 * s + c.n());
    if (!(from_schur(c, expand_in_schur(x)) == x)) r.fail("expand then rebuild differs for a random class");
  }
  return r;
}

}  // namespace sym

inline void add_symbolic(std::vector<Check>& out, int k, int n, bool spot) {
  const std::string base = "symbolic/" + kn_name(k, n) + "/";
  json par = {{"k", k}, {"n", n}};
  auto ctx = [k, n]() -> const TrigContext& { return trig_context(k, n); };
  auto add = [&](const std::string& nm, std::function<SymbolicCheck()> f) {
    out.push_back({base + nm, par, [f] { return from_symbolic(f()); }});
  };
  add("z_symmetry", [=] { return sym::z_symmetry(ctx()); });
  add("membership", [=] { return sym::membership(ctx(), !spot); });
  add("evaluation", [=] { return sym::evaluation(ctx()); });
  add("lift", [=] { return sym::lift(ctx(), spot ? 1 : 2); });
  add("tau_det", [=] { return spot ? sym::tau_det_spot(ctx()) : sym::tau_det_full(ctx()); });
  add("schur_det", [=] { return sym::schur_det(k, n); });
  add("laplace", [=] { return laplace_checks(k, n); });
  add("round_trip", [=] { return sym::round_trip(ctx()); });
  if (spot) return;
  add("orthogonality", [=] { return orthogonality_check(ctx()); });
  add("weight_det", [=] { return weight_det_check(ctx(), n <= 3); });
  add("integrality", [=] { return sym::integrality(ctx()); });
  add("charpoly", [=] { return charpoly_invariance(ctx(), monodromy_matrices(ctx())); });
}

// Every exact check for 1 <= k <= n <= max_n; with max_n = 4 also spot checks at (1,5), (2,5).
inline std::vector<Check> symbolic_checks(int max_n) {
  std::vector<Check> out;
  for (int n = 1; n <= max_n; ++n)
    for (int k = 1; k <= n; ++k) add_symbolic(out, k, n, false);
  if (max_n == 4) {
    add_symbolic(out, 1, 5, true);
    add_symbolic(out, 2, 5, true);
  }
  return out;
}

struct NumericConfig {
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int points = 5;
};

inline std::string idx(int i) { return (i < 10 ? "0" : "") + std::to_string(i); }

inline std::vector<Check> numeric_checks(const NumericConfig& cfg) {
  std::vector<Check> out;
  const double tol = cfg.tol;

  // closed form of the k = n = 1 series
  for (double radius : {0.2, 0.5}) {
    Rng r(cfg.seed * 7919 + static_cast<std::uint64_t>(radius * 10));
    for (int i = 0; i < 20; ++i) {
      ParameterPoint P = sample_single(r);
      double th = r.uniform(0.1, kPi - 0.1);
      cplx pv = std::polar(radius, -th);
      json par = to_json(P);
      par["p"] = to_json(pv);
      out.push_back({"numeric/series_closed_form/r" + std::to_string(static_cast<int>(radius * 10)) + "/" + idx(i), par,
                     [P, pv] {
                       NumericCheck c;
                       auto F = f_series(FixedPointIndex(1, 1, {1}), P, BranchedP(pv), Side::zero, {1e-13, 60});
                       cplx want = std::exp(kI * kPi * P.z(1)) * std::pow(1.0 - pv, P.h());
                       c.record(std::abs(F.values[0] - want), 1e-10, "F0 - closed form");
                       c.metrics.push_back({"truncation_order", F.truncation_order});
                       return from_numeric(c);
                     }});
    }
  }

  // integral against series
  struct IntegralCase {
    int k, n;
    double tol;
  };
  for (auto cs : {IntegralCase{1, 2, tol}, IntegralCase{1, 3, tol}, IntegralCase{2, 3, std::max(tol, 1e-4)}}) {
    Rng r(cfg.seed * 104729 + 10 * cs.k + cs.n);
    for (int i = 0; i < cfg.points; ++i) {
      ParameterPoint P = sample_lint(cs.n, r);
      for (double pv : {-0.5, -2.0}) {
        json par = to_json(P);
        par["p"] = to_json(pv);
        par["sigma"] = identity_permutation(cs.n);
        std::string side = pv > -1 ? "zero" : "inf";
        out.push_back({"numeric/thm52/" + kn_name(cs.k, cs.n) + "/" + side + "/" + idx(i), par, [P, pv, cs] {
                         double qt = cs.k == 1 ? 1e-10 : 1e-8;
                         auto res = thm52_check(cs.k, identity_permutation(P.n()), P, BranchedP(pv), cs.tol, mb_options(qt));
                         return from_numeric(res.check);
                       }});
      }
    }
  }

  // determinant formula
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}, {2, 3}}) {
    Rng r(cfg.seed * 1299709 + 10 * k + n);
    ParameterPoint P = sample_lint(n, r);
    double t = k == 2 ? std::max(tol, 1e-4) : tol;
    json par = to_json(P);
    par["p_zero"] = to_json(-0.2);
    par["p_inf"] = to_json(-5.0);
    out.push_back({"numeric/detM/" + kn_name(k, n), par, [P, k, t] {
                     auto res = detM_check(k, P, BranchedP(-0.2), BranchedP(-5.0), t);
                     auto o = from_numeric(res.check);
                     o.metrics["exponent_match"] = res.exponent_match;
                     return o;
                   }});
  }

  // monodromy
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}}) {
    Rng r(cfg.seed * 15485863 + 10 * k + n);
    ParameterPoint P = sample_lint(n, r);
    json par = to_json(P);
    par["p_zero"] = to_json(-0.5);
    par["p_inf"] = to_json(-2.0);
    out.push_back({"numeric/monodromy/" + kn_name(k, n), par, [P, k] {
                     return from_numeric(monodromy_numeric_check(k, P, BranchedP(-0.5), BranchedP(-2.0), 1e-12, 1e-8));
                   }});
  }

  // Gamma reflection
  out.push_back({"numeric/gamma_reflection", json{{"points", 1000}}, [seed = cfg.seed] {
                   NumericCheck c;
                   Rng r(seed * 32452843);
                   for (int i = 0; i < 1000;) {
                     cplx w(r.uniform(-5, 5), r.uniform(-20, 20));
                     if (near_integer(w, 1e-3)) continue;
                     ++i;
                     cplx lhs = gamma_c(w) * gamma_c(1.0 - w), rhs = kPi / std::sin(kPi * w);
                     c.record(std::abs(lhs / rhs - 1.0), 1e-11, "reflection");
                   }
                   return from_numeric(c);
                 }});

  // quadrature cutoff doubling
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}}) {
    Rng r(cfg.seed * 49979687 + 10 * k + n);
    ParameterPoint P = sample_lint(n, r);
    double qt = k == 1 ? 1e-10 : 1e-8;
    json par = to_json(P);
    par["p"] = to_json(-0.5);
    out.push_back({"numeric/quadrature_cutoff/" + kn_name(k, n), par, [P, k, qt] {
                     NumericCheck c;
                     auto a = mellin_barnes(k, P, BranchedP(-0.5), mb_options(qt));
                     auto b = mellin_barnes(k, P, BranchedP(-0.5), mb_options(qt, 2 * a.cutoff));
                     for (std::size_t j = 0; j < a.values.size(); ++j)
                       c.record(rel_dev(a.values[j], b.values[j]), qt, "cutoff doubling at " + a.points[j].to_json());
                     c.metrics.push_back({"cutoff", a.cutoff});
                     return from_numeric(c);
                   }});
  }
  return out;
}

// ---------------------------------------------------------------- running

struct Result {
  Check check;
  Outcome outcome;
  double runtime_ms = 0;
};

inline std::vector<Result> run_checks(std::vector<Check> checks, int threads) {
  std::vector<Result> res(checks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < checks.size();) {
      auto t0 = std::chrono::steady_clock::now();
      Outcome o;
      try {
        o = checks[i].run();
      } catch (const std::exception& e) {
        o = {false, false, 0, std::string("error: ") + e.what(), json::object()};
      }
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      res[i] = {checks[i], o, ms};
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::sort(res.begin(), res.end(), [](const Result& a, const Result& b) { return a.check.name < b.check.name; });
  return res;
}

inline bool all_pass(const std::vector<Result>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const Result& r) { return r.outcome.pass; });
}

inline json report(const std::vector<Result>& rs, bool timing) {
  json checks = json::array();
  std::size_t failed = 0;
  for (auto& r : rs) {
    json c = {{"name", r.check.name},
              {"parameters", r.check.parameters},
              {"status", r.outcome.pass ? "pass" : "fail"}};
    if (r.outcome.exact)
      c["max_abs_err"] = "exact";
    else
      c["max_abs_err"] = r.outcome.max_err;
    if (!r.outcome.detail.empty()) c["detail"] = r.outcome.detail;
    if (!r.outcome.metrics.empty()) c["metrics"] = r.outcome.metrics;
    if (timing) c["runtime_ms"] = r.runtime_ms;
    if (!r.outcome.pass) ++failed;
    checks.push_back(c);
  }
  return {{"checks", checks}, {"total", rs.size()}, {"failed", failed}};
}

}  // namespace kmono::suite
