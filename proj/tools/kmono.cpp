#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "suite.hpp"

using namespace kmono;
using suite::json;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  bool json_out = false;
  bool timing = false;
  std::string out;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int threads = 1;
};

std::vector<double> numbers(const std::string& s) {
  std::vector<double> v;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',' || c == ';' || c == ' ') {
      if (!cur.empty()) {
        std::size_t used = 0;
        try {
          v.push_back(std::stod(cur, &used));
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != cur.size()) throw Usage("not a number: " + cur);
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  return v;
}

cplx parse_complex(const std::string& s) {
  auto v = numbers(s);
  if (v.size() == 1) return v[0];
  if (v.size() == 2) return {v[0], v[1]};
  throw Usage("expected re or re,im: " + s);
}

// "z1,...,zn" as reals, "re,im,re,im,..." as 2n numbers, or "re,im;re,im;..."
std::vector<cplx> parse_z(const std::string& s, int n) {
  std::vector<cplx> z;
  if (s.find(';') != std::string::npos) {
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ';');) z.push_back(parse_complex(part));
  } else {
    auto v = numbers(s);
    if (static_cast<int>(v.size()) == n)
      for (double x : v) z.push_back(x);
    else if (static_cast<int>(v.size()) == 2 * n)
      for (int a = 0; a < n; ++a) z.push_back({v[2 * a], v[2 * a + 1]});
  }
  if (static_cast<int>(z.size()) != n) throw Usage("--z needs " + std::to_string(n) + " values");
  return z;
}

std::vector<int> parse_sigma(const std::string& s, int n) {
  if (s.empty()) return identity_permutation(n);
  std::vector<int> v;
  for (double x : numbers(s)) v.push_back(static_cast<int>(x));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != identity_permutation(n)) throw Usage("--sigma is not a permutation of 1.." + std::to_string(n));
  return v;
}

void check_kn(int k, int n) {
  if (n < 1 || k < 1 || k > n) throw Usage("need 1 <= k <= n");
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw Usage("cannot write " + g.out);
  f << text;
}

void emit_json(const Globals& g, const json& j) { emit(g, j.dump(2) + "\n"); }

json values_json(const std::vector<FixedPointIndex>& pts, const std::vector<cplx>& v) {
  json o = json::object();
  for (std::size_t j = 0; j < pts.size(); ++j) o[pts[j].to_json()] = suite::to_json(v[j]);
  return o;
}

std::string values_text(const std::vector<FixedPointIndex>& pts, const std::vector<cplx>& v) {
  std::ostringstream s;
  s << std::setprecision(16);
  for (std::size_t j = 0; j < pts.size(); ++j) s << pts[j].to_json() << " " << v[j].real() << " " << v[j].imag() << "\n";
  return s.str();
}

template <class M>
json matrix_json(const M& m) {
  json a = json::array();
  for (auto& row : m) {
    json r = json::array();
    for (auto& x : row) r.push_back(x.to_string());
    a.push_back(r);
  }
  return a;
}

template <class M>
std::string matrix_text(const std::string& title, const M& m) {
  std::string s = title + "\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j)
      s += "  [" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "] " + m[i][j].to_string() + "\n";
  return s;
}

int report_suite(const Globals& g, const std::vector<suite::Result>& rs) {
  if (g.json_out) {
    emit_json(g, suite::report(rs, g.timing));
  } else {
    std::string s;
    for (auto& r : rs) {
      s += std::string(r.outcome.pass ? "PASS " : "FAIL ") + r.check.name;
      if (!r.outcome.exact) {
        std::ostringstream e;
        e << std::setprecision(3) << r.outcome.max_err;
        s += "  max_err=" + e.str();
      }
      if (!r.outcome.pass) s += "  " + r.outcome.detail;
      s += "\n";
    }
    std::size_t failed = std::count_if(rs.begin(), rs.end(), [](auto& r) { return !r.outcome.pass; });
    s += std::to_string(rs.size() - failed) + "/" + std::to_string(rs.size()) + " checks passed\n";
    emit(g, s);
  }
  return suite::all_pass(rs) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kmono: weight functions, K-theory, monodromy and hypergeometric solutions for T*Gr(k,n)"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json_out, "JSON output")->configurable();
  app.add_option("--out", g.out, "write output to FILE");
  app.add_option("--seed", g.seed, "seed for sampled parameters");
  app.add_option("--tol", g.tol, "tolerance");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--timing", g.timing, "include runtime_ms in reports");
  app.fallthrough();

  int k = 1, n = 1;
  auto kn = [&](CLI::App* s) {
    s->add_option("--k", k)->required();
    s->add_option("--n", n)->required();
  };

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::string suite_name = "all";
  int max_n = 4;
  int points = 5;
  verify->add_option("--suite", suite_name)->check(CLI::IsMember({"symbolic", "numeric", "all"}));
  verify->add_option("--max-n", max_n)->check(CLI::Range(1, 4));
  verify->add_option("--points", points, "sampled points per numeric case")->check(CLI::PositiveNumber);

  auto* weights = app.add_subcommand("weights", "print a weight function");
  std::string kind, sigma_s, eval_at, shift = "none";
  kn(weights);
  weights->add_option("--kind", kind)->required()->check(CLI::IsMember({"we0", "weinf", "reduced", "coh"}));
  weights->add_option("--sigma", sigma_s);
  weights->add_option("--eval-at", eval_at, "fixed point, e.g. 1,3");
  weights->add_option("--shift", shift, "none or H")->check(CLI::IsMember({"none", "H"}));

  auto* tau = app.add_subcommand("tau", "transition matrix in the fixed-point basis");
  std::string basis = "fixedpoint";
  bool tau_det_flag = false, tau_inverse = false;
  kn(tau);
  tau->add_option("--basis", basis)->check(CLI::IsMember({"fixedpoint"}));
  tau->add_flag("--det", tau_det_flag, "determinant against its reference value");
  tau->add_flag("--inverse", tau_inverse);

  auto* schur = app.add_subcommand("schur-matrices", "monodromy matrices in the Schur basis");
  kn(schur);

  SeriesOptions so;
  std::string z_s, h_s, p_s, side_s = "0", class_s;
  int winding = 0, order = -1;
  auto* solve = app.add_subcommand("solve", "series solution at fixed points");
  kn(solve);
  solve->add_option("--z", z_s)->required();
  solve->add_option("--h", h_s)->required();
  solve->add_option("--p", p_s)->required();
  solve->add_option("--winding", winding);
  solve->add_option("--side", side_s)->check(CLI::IsMember({"0", "inf"}));
  solve->add_option("--class", class_s, "schur:I or point:I")->required();
  solve->add_option("--order", order, "fixed truncation order");

  auto* integral = app.add_subcommand("integral", "Mellin-Barnes integral at fixed points");
  double cutoff = 0;
  kn(integral);
  integral->add_option("--z", z_s)->required();
  integral->add_option("--h", h_s)->required();
  integral->add_option("--p", p_s)->required();
  integral->add_option("--winding", winding);
  integral->add_option("--cutoff", cutoff);

  auto* check = app.add_subcommand("check", "one numeric check at a sampled point");
  std::string check_name;
  kn(check);
  check->add_option("--name", check_name)->required()->check(CLI::IsMember({"thm52", "detM", "monodromy"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) {
      std::vector<suite::Check> checks;
      if (suite_name != "numeric") checks = suite::symbolic_checks(max_n);
      if (suite_name != "symbolic") {
        auto nc = suite::numeric_checks({g.seed, g.tol, points});
        checks.insert(checks.end(), nc.begin(), nc.end());
      }
      return report_suite(g, suite::run_checks(std::move(checks), g.threads));
    }

    if (*weights) {
      check_kn(k, n);
      auto sigma = parse_sigma(sigma_s, n);
      Poly w;
      if (kind == "coh") {
        CohContext c(k, n);
        w = coh_weight(c);
        if (!eval_at.empty()) w = coh_restrict(c, w, parse_subset(eval_at, k, n));
      } else {
        const TrigContext& c = trig_context(k, n);
        w = kind == "reduced" ? trig_weight_reduced(c) : kind == "we0" ? trig_weight_zero(c, sigma) : trig_weight_inf(c, sigma);
        if (!eval_at.empty()) w = eval_at_fixed_point(c, w, parse_subset(eval_at, k, n), shift == "H");
      }
      if (g.json_out)
        emit_json(g, {{"kind", kind}, {"k", k}, {"n", n}, {"sigma", sigma}, {"poly", w.to_string()}});
      else
        emit(g, w.to_string() + "\n");
      return 0;
    }

    if (*tau) {
      check_kn(k, n);
      const TrigContext& c = trig_context(k, n);
      if (tau_det_flag) {
        RatFun d = tau_det(c);
        Poly ref = c.H(static_cast<int>(tau_det_exponent(k, n)));
        bool pass = d == RatFun(ref);
        if (g.json_out)
          emit_json(g, {{"det", d.to_string()}, {"reference", ref.to_string()}, {"pass", pass}});
        else
          emit(g, std::string(pass ? "PASS" : "FAIL") + " det = " + d.to_string() + ", reference " + ref.to_string() + "\n");
        return pass ? 0 : 1;
      }
      auto m = tau_matrix(c, tau_inverse);
      json pts = json::array();
      for (auto& I : subsets(k, n)) pts.push_back(I.to_json());
      if (g.json_out)
        emit_json(g, {{"basis", basis}, {"points", pts}, {"inverse", tau_inverse}, {"matrix", matrix_json(m)}});
      else
        emit(g, matrix_text(tau_inverse ? "tau^-1" : "tau", m));
      return 0;
    }

    if (*schur) {
      check_kn(k, n);
      const TrigContext& c = trig_context(k, n);
      auto mm = monodromy_matrices(c);
      if (g.json_out) {
        json pts = json::array();
        for (auto& I : subsets(k, n)) pts.push_back(I.to_json());
        emit_json(g, {{"points", pts},
                      {"M", matrix_json(mm.M)},
                      {"T", matrix_json(mm.T)},
                      {"Tinv", matrix_json(mm.Tinv)},
                      {"scalar_mu_inf", mm.scalar.to_string()}});
      } else {
        emit(g, matrix_text("M", mm.M) + matrix_text("T", mm.T) + matrix_text("Tinv", mm.Tinv) +
                    "scalar_mu_inf " + mm.scalar.to_string() + "\n");
      }
      return 0;
    }

    if (*solve || *integral) {
      check_kn(k, n);
      ParameterPoint P(parse_z(z_s, n), parse_complex(h_s));
      BranchedP p(parse_complex(p_s), winding);
      if (*integral) {
        MBOptions o;
        if (app.count("--tol")) o.tol = g.tol;
        o.cutoff = cutoff;
        auto r = mellin_barnes(k, P, p, o);
        auto q = q_values(k, P);
        for (std::size_t j = 0; j < q.size(); ++j) r.values[j] *= q[j];
        if (g.json_out)
          emit_json(g, {{"values", values_json(r.points, r.values)}, {"cutoff", r.cutoff}, {"evaluations", r.evaluations}});
        else
          emit(g, values_text(r.points, r.values));
        return 0;
      }
      auto colon = class_s.find(':');
      if (colon == std::string::npos) throw Usage("--class must be schur:I or point:I");
      std::string what = class_s.substr(0, colon);
      FixedPointIndex I = parse_subset(class_s.substr(colon + 1), k, n);
      if (app.count("--tol")) so.tol = g.tol;
      so.fixed_order = order;
      Side side = side_s == "0" ? Side::zero : Side::inf;
      SolutionEvaluation r;
      if (what == "point")
        r = psi_point(I, P, p, side, so);
      else if (what == "schur")
        r = psi_of_class(schur_class(trig_context(k, n), I), P, p, side, so);
      else
        throw Usage("--class must be schur:I or point:I");
      if (g.json_out)
        emit_json(g, {{"values", values_json(r.points, r.values)},
                      {"truncation_order", r.truncation_order},
                      {"tail_estimate", r.tail_estimate}});
      else
        emit(g, values_text(r.points, r.values));
      return 0;
    }

    if (*check) {
      check_kn(k, n);
      suite::Rng r(g.seed);
      ParameterPoint P = suite::sample_lint(n, r);
      json par = suite::to_json(P);
      par["seed"] = g.seed;
      suite::Check c{"check/" + check_name + "/" + suite::kn_name(k, n), par, nullptr};
      if (check_name == "thm52") {
        double t = g.tol;
        c.run = [=] {
          NumericCheck all;
          for (double pv : {-0.5, -2.0}) {
            auto res = thm52_check(k, identity_permutation(n), P, BranchedP(pv), t, suite::mb_options(k == 1 ? 1e-10 : 1e-8));
            for (auto& [nm, v] : res.check.metrics) all.metrics.push_back({nm + (pv > -1 ? "_zero" : "_inf"), v});
            all.record(res.check.max_err, t, std::string(pv > -1 ? "zero side" : "inf side") +
                                                 (res.check.pass ? "" : ": " + res.check.detail));
          }
          return suite::from_numeric(all);
        };
      } else if (check_name == "detM") {
        double t = g.tol;
        c.run = [=] {
          auto res = detM_check(k, P, BranchedP(-0.2), BranchedP(-5.0), t);
          auto o = suite::from_numeric(res.check);
          o.metrics["exponent_match"] = res.exponent_match;
          return o;
        };
      } else {
        c.run = [=] { return suite::from_numeric(monodromy_numeric_check(k, P, BranchedP(-0.5), BranchedP(-2.0), 1e-12, 1e-8)); };
      }
      return report_suite(g, suite::run_checks({c}, 1));
    }
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const SizeLimit& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
