#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "irrhodge/charp.hpp"
#include "irrhodge/filt_fuzz.hpp"
#include "irrhodge/filt_json.hpp"
#include "irrhodge/jsonutil.hpp"
#include "irrhodge/localchecks.hpp"
#include "irrhodge/p1global.hpp"
#include "irrhodge/prng.hpp"

// Batch driver: task runners behind the command-line tool.  A run plan is a
// JSON document {"tasks": [{"kind": ..., "params": {...}}, ...]}; each task
// resolves to a deterministic computation whose verdicts are collected into a
// canonical JSON report (insertion-ordered keys, integer/string scalars
// only), so identical plans and seeds produce byte-identical reports.  Exit
// status of the tool is nonzero exactly when some asserted check fails.

namespace irrhodge {

struct RunOptions {
  uint64_t seed = 1;    // default seed for seedable tasks (plan params win)
  int truncation = -1;  // Cech window override; -1 = per-instance default
  int jobs = 1;         // worker threads across tasks
  bool timings = false; // include wall-clock timings (breaks byte-identity)
};

// A malformed plan or parameter set: reported as a usage error (exit 2),
// distinct from a task whose asserted theorem-check fails (exit 1).
struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameter parsing
// ---------------------------------------------------------------------------

namespace clidetail {

inline std::string rat_str(const Rat& x) { return x.get_str(); }

inline const Json& expect_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw PlanError(where + ": expected a JSON object");
  return j;
}

inline int get_int(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw PlanError(where + ": missing required key \"" + key + "\"");
  if (!j.at(key).is_number_integer())
    throw PlanError(where + ": key \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

inline int get_int_or(const Json& j, const std::string& key, int dflt, const std::string& where) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer())
    throw PlanError(where + ": key \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

inline bool get_bool_or(const Json& j, const std::string& key, bool dflt,
                        const std::string& where) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean())
    throw PlanError(where + ": key \"" + key + "\" must be a boolean");
  return j.at(key).get<bool>();
}

inline Rat get_rat(const Json& j, const std::string& where) {
  try {
    return rat_from_json(j);
  } catch (const std::exception& e) {
    throw PlanError(where + ": " + e.what());
  }
}

inline std::vector<Rat> rat_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw PlanError(where + ": expected an array of rationals");
  std::vector<Rat> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(get_rat(j.at(i), where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<int> int_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw PlanError(where + ": expected an array of integers");
  std::vector<int> out;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number_integer())
      throw PlanError(where + "[" + std::to_string(i) + "]: expected an integer");
    out.push_back(j.at(i).get<int>());
  }
  return out;
}

inline Poly<Rat> poly_from_json(const Json& j, const std::string& where) {
  std::vector<Rat> c = rat_list(j, where);
  return Poly<Rat>(c);
}

}  // namespace clidetail

// Problem description of a projective-line instance:
//   {"f": {"num": [c0, c1, ...], "den": [c0, ...]},
//    "horizontal": [points...], "horizontal_inf": bool}
// Coefficient lists are ascending-degree; entries are integers, decimal
// strings, or [num, den] pairs.
inline P1Instance<Rat> instance_from_json(const Json& params, const std::string& where) {
  clidetail::expect_object(params, where);
  if (!params.contains("f")) throw PlanError(where + ": missing required key \"f\"");
  const Json& f = clidetail::expect_object(params.at("f"), where + ".f");
  if (!f.contains("num") || !f.contains("den"))
    throw PlanError(where + ".f: needs \"num\" and \"den\" coefficient arrays");
  Poly<Rat> num = clidetail::poly_from_json(f.at("num"), where + ".f.num");
  Poly<Rat> den = clidetail::poly_from_json(f.at("den"), where + ".f.den");
  std::vector<Rat> horiz;
  if (params.contains("horizontal"))
    horiz = clidetail::rat_list(params.at("horizontal"), where + ".horizontal");
  bool horiz_inf = clidetail::get_bool_or(params, "horizontal_inf", false, where);
  try {
    return make_p1_instance(num, den, horiz, horiz_inf);
  } catch (const std::exception& e) {
    throw PlanError(where + ": " + e.what());
  }
}

// Local-model chart description: {"ell": l, "m": m, "pz": k, "e": [e_1...]}.
inline ChartData local_chart_from_json(const Json& j, const std::string& where) {
  clidetail::expect_object(j, where);
  ChartData c;
  c.ell = clidetail::get_int(j, "ell", where);
  c.m = clidetail::get_int(j, "m", where);
  c.pz = clidetail::get_int(j, "pz", where);
  if (j.contains("e")) c.e = clidetail::int_list(j.at("e"), where + ".e");
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw PlanError(where + ": " + e.what());
  }
  return c;
}

// Characteristic-p monomial chart: {"n": dim, "fexp": [...], "m": count}.
inline MonomialChart charp_chart_from_json(const Json& j, const std::string& where) {
  clidetail::expect_object(j, where);
  int n = clidetail::get_int(j, "n", where);
  int m = clidetail::get_int(j, "m", where);
  std::vector<int> fexp;
  if (j.contains("fexp")) fexp = clidetail::int_list(j.at("fexp"), where + ".fexp");
  try {
    return MonomialChart(n, fexp, m);
  } catch (const std::exception& e) {
    throw PlanError(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

struct TaskResult {
  Json report;
  bool ok = true;
};

namespace clidetail {

// Ordered accumulator for named pass/fail checks within one task.
struct CheckList {
  Json checks = Json::array();
  bool ok = true;

  void add(const std::string& name, bool pass) {
    Json c;
    c["name"] = name;
    c["pass"] = pass;
    checks.push_back(std::move(c));
    ok = ok && pass;
  }
  void add(const std::string& name, bool pass, Json witness) {
    Json c;
    c["name"] = name;
    c["pass"] = pass;
    if (!pass) c["witness"] = std::move(witness);
    checks.push_back(std::move(c));
    ok = ok && pass;
  }
};

inline Json json_of_dims(const std::vector<int>& d) {
  Json j = Json::array();
  for (int x : d) j.push_back(x);
  return j;
}

template <class R>
Json json_of_mpoly(const MPoly<R>& a) {
  Json j = Json::array();
  for (auto& [e, c] : a.c) {
    Json term = Json::array();
    term.push_back((long long)c.v);
    term.push_back(json_of_dims(e));
    j.push_back(term);
  }
  return j;
}

inline std::string chart_label(const ChartData& c) {
  std::ostringstream os;
  os << "(ell=" << c.ell << ",m=" << c.m << ",pz=" << c.pz << ",e=[";
  for (size_t i = 0; i < c.e.size(); ++i) os << (i ? "," : "") << c.e[i];
  os << "])";
  return os.str();
}

}  // namespace clidetail

// ---------------------------------------------------------------------------
// Task: p1-uv — twist independence of hypercohomology dimensions, checked
// against the direct one-chart oracle at alpha = 0.
// ---------------------------------------------------------------------------

inline TaskResult task_p1_uv(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  P1Instance<Rat> inst = instance_from_json(params, "p1-uv");
  std::vector<Rat> alphas = {Rat(0)};
  if (params.contains("alpha_grid")) alphas = rat_list(params.at("alpha_grid"), "p1-uv.alpha_grid");
  std::vector<std::pair<Rat, Rat>> extra = {{Rat(2), Rat(3)}};
  if (params.contains("uv_samples")) {
    extra.clear();
    const Json& s = params.at("uv_samples");
    if (!s.is_array()) throw PlanError("p1-uv.uv_samples: expected an array of [u, v] pairs");
    for (size_t i = 0; i < s.size(); ++i) {
      if (!s.at(i).is_array() || s.at(i).size() != 2)
        throw PlanError("p1-uv.uv_samples[" + std::to_string(i) + "]: expected [u, v]");
      extra.push_back({get_rat(s.at(i).at(0), "p1-uv.uv_samples"),
                       get_rat(s.at(i).at(1), "p1-uv.uv_samples")});
    }
  }
  int T = get_int_or(params, "truncation", opts.truncation, "p1-uv");

  CheckList cl;
  Json tables = Json::array();
  try {
    for (const Rat& alpha : alphas) {
      UvIndependenceReport<Rat> rep = verify_uv_independence(inst, alpha, extra, T);
      Json tb;
      tb["alpha"] = json_of(alpha);
      Json rows = Json::array();
      for (auto& [uv, dims] : rep.table) {
        Json r;
        r["u"] = json_of(uv.first);
        r["v"] = json_of(uv.second);
        r["dims"] = json_of_dims(dims);
        rows.push_back(r);
      }
      tb["rows"] = rows;
      tb["sheaf_sum"] = json_of_dims(rep.sheaf_sum);
      std::string at = " at alpha=" + rat_str(alpha);
      cl.add("dimensions independent of (u,v)" + at, rep.all_equal, tb);
      cl.add("zero differential gives the sheaf sum" + at, rep.zero_twist_matches_sum, tb);
      if (alpha == Rat(0)) {
        OracleDims od = direct_de_rham_oracle(inst);
        Json oj;
        oj["h0"] = od.h0;
        oj["h1"] = od.h1;
        tb["oracle"] = oj;
        bool agree = !rep.table.empty() &&
                     rep.table[0].second == std::vector<int>{od.h0, od.h1, 0};
        cl.add("one-chart oracle agreement at alpha=0", agree, oj);
      }
      tables.push_back(tb);
    }
  } catch (const StabilizationError& e) {
    cl.add("window stabilization", false, Json(e.what()));
  }

  TaskResult res;
  res.report["tables"] = tables;
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: p1-hodge — irregular Hodge filtration on H^k: injectivity of every
// filtration step, monotonicity, graded sum, and the jump multiset.
// ---------------------------------------------------------------------------

inline TaskResult task_p1_hodge(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  P1Instance<Rat> inst = instance_from_json(params, "p1-hodge");
  std::vector<int> ks = {0, 1, 2};
  if (params.contains("k_list")) ks = int_list(params.at("k_list"), "p1-hodge.k_list");
  int T = get_int_or(params, "truncation", opts.truncation, "p1-hodge");

  CheckList cl;
  Json tables = Json::array();
  try {
    for (int k : ks) {
      HodgeReport rep = irregular_hodge(inst, k, T);
      Json tb;
      tb["k"] = k;
      tb["h_total"] = rep.h_total;
      tb["window"] = rep.window;
      Json grid = Json::array();
      for (auto& pt : rep.points) {
        Json g;
        g["lambda"] = json_of(pt.lambda);
        g["step_dim"] = pt.dim_standalone;
        g["image_dim"] = pt.dim_filt;
        g["injective"] = pt.injective;
        grid.push_back(g);
      }
      tb["grid"] = grid;
      Json jumps = Json::array();
      for (auto& [lam, mult] : rep.jumps) {
        Json j = Json::array();
        j.push_back(json_of(lam));
        j.push_back(mult);
        jumps.push_back(j);
      }
      tb["jumps"] = jumps;
      std::string at = " for k=" + std::to_string(k);
      cl.add("every filtration step injects into H^k" + at, rep.injective_all, tb);
      cl.add("filtration dimensions are monotone" + at, rep.monotone, tb);
      cl.add("filtration is full at lambda=0" + at, rep.full_at_zero, tb);
      cl.add("graded dimensions sum to dim H^k" + at, rep.sum_matches, tb);
      cl.add("ambient complex matches the twisted model" + at, rep.ambient_matches, tb);
      if (rep.integer_jumps_expected)
        cl.add("jumps are integral (reduced pole divisor)" + at, rep.integer_jumps, tb);
      tables.push_back(tb);
    }
  } catch (const StabilizationError& e) {
    cl.add("window stabilization", false, Json(e.what()));
  }

  TaskResult res;
  res.report["tables"] = tables;
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: p1-degeneration — dim H^k equals the sum of the sheaf-cohomology
// dimensions of the two terms, for every requested twist and degree.
// ---------------------------------------------------------------------------

inline TaskResult task_p1_degeneration(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  P1Instance<Rat> inst = instance_from_json(params, "p1-degeneration");
  std::vector<Rat> alphas = {Rat(0)};
  if (params.contains("alpha_grid"))
    alphas = rat_list(params.at("alpha_grid"), "p1-degeneration.alpha_grid");
  std::vector<int> ks = {0, 1, 2};
  if (params.contains("k_list")) ks = int_list(params.at("k_list"), "p1-degeneration.k_list");
  int T = get_int_or(params, "truncation", opts.truncation, "p1-degeneration");

  CheckList cl;
  Json tables = Json::array();
  try {
    for (const Rat& alpha : alphas) {
      for (int k : ks) {
        DecompositionReport rep = decomposition_check(inst, alpha, k, T);
        Json tb;
        tb["alpha"] = json_of(alpha);
        tb["k"] = k;
        tb["hypercohomology"] = rep.hypercoh;
        Json pieces = Json::array();
        for (auto& [p, h] : rep.pieces) {
          Json pr = Json::array();
          pr.push_back(p);
          pr.push_back(h);
          pieces.push_back(pr);
        }
        tb["pieces"] = pieces;
        tb["sum"] = rep.sum;
        tables.push_back(tb);
        cl.add("H^" + std::to_string(k) + " decomposes at alpha=" + rat_str(alpha), rep.pass, tb);
      }
    }
  } catch (const StabilizationError& e) {
    cl.add("window stabilization", false, Json(e.what()));
  }

  TaskResult res;
  res.report["tables"] = tables;
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: local-verify — the local-model checks on monomial charts: slice
// complexes of the f-adapted subcomplex, graded pieces of the pole-order
// filtration, the three-term sequence with its relative complex, and the
// quotient-cohomology count on reduced charts.
// ---------------------------------------------------------------------------

namespace clidetail {

inline std::vector<ChartData> charts_from_params(const Json& params, const std::string& where) {
  std::vector<ChartData> charts;
  if (params.contains("charts")) {
    const Json& arr = params.at("charts");
    if (!arr.is_array()) throw PlanError(where + ".charts: expected an array");
    for (size_t i = 0; i < arr.size(); ++i)
      charts.push_back(
          local_chart_from_json(arr.at(i), where + ".charts[" + std::to_string(i) + "]"));
    return charts;
  }
  // Family enumeration: every chart with 1 <= ell, ell+m+pz <= max_total and
  // multiplicities 1 <= e_i <= max_e (e nondecreasing to avoid relabelings).
  const Json fam = params.contains("family") ? params.at("family") : Json::object();
  int max_total = get_int_or(fam, "max_total", 3, where + ".family");
  int max_e = get_int_or(fam, "max_e", 3, where + ".family");
  if (max_total < 1 || max_e < 1) throw PlanError(where + ".family: bounds must be >= 1");
  for (int total = 1; total <= max_total; ++total)
    for (int ell = 1; ell <= total; ++ell)
      for (int m = 0; ell + m <= total; ++m) {
        int pz = total - ell - m;
        std::vector<int> e(ell, 1);
        while (true) {
          ChartData c;
          c.ell = ell;
          c.m = m;
          c.pz = pz;
          c.e = e;
          charts.push_back(c);
          int i = ell - 1;
          while (i >= 0 && e[i] == max_e) --i;
          if (i < 0) break;
          e[i] += 1;
          for (int j = i + 1; j < ell; ++j) e[j] = e[i];
        }
      }
  return charts;
}

}  // namespace clidetail

inline TaskResult task_local_verify(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  (void)opts;
  expect_object(params, "local-verify");
  std::vector<ChartData> charts = charts_from_params(params, "local-verify");
  int bound = get_int_or(params, "slice_bound", 2, "local-verify");
  if (bound < 0) throw PlanError("local-verify.slice_bound: must be >= 0");

  CheckList cl;
  Json tables = Json::array();
  for (const ChartData& c : charts) {
    std::string lab = chart_label(c);
    MdWindow w = box_window(c, bound);

    // Twist grid: 0 plus every fractional multiple of 1/e_i below 1.
    std::vector<Rat> mus = {Rat(0)};
    std::vector<Rat> fracs;
    {
      std::set<Rat> seen = {Rat(0)};
      for (int e : c.e)
        for (int r = 1; r < e; ++r) {
          Rat q(r, e);
          q.canonicalize();
          if (seen.insert(q).second) {
            mus.push_back(q);
            fracs.push_back(q);
          }
        }
      if (fracs.empty()) fracs.push_back(Rat(1, 2));
    }
    if (params.contains("mu_grid")) mus = rat_list(params.at("mu_grid"), "local-verify.mu_grid");

    int checks_before = (int)cl.checks.size();
    for (int p = 0; p <= c.n(); ++p)
      for (const Rat& mu : mus) {
        OmegaFLogVerdict v = verify_omega_f_log<Rat>(c, mu, p, w);
        Json wit = Json::array();
        for (auto& f : v.failures) {
          Json fj;
          fj["anchor"] = json_of_dims(f.anchor);
          fj["position"] = f.position;
          fj["h_dim"] = f.h_dim;
          fj["differential"] = f.differential;
          wit.push_back(fj);
        }
        cl.add("slice complexes exact and kernels match " + lab + " p=" + std::to_string(p) +
                   " mu=" + rat_str(mu),
               v.pass && v.hp_matches_omega_f, wit);
      }

    std::vector<Rat> lam_nonpos = {Rat(0), Rat(-1)};
    if (params.contains("lambda_nonpos"))
      lam_nonpos = rat_list(params.at("lambda_nonpos"), "local-verify.lambda_nonpos");
    for (const Rat& lam : lam_nonpos) {
      if (lam > 0) throw PlanError("local-verify.lambda_nonpos: entries must be <= 0");
      GrComplexResult<Rat> r = gr_complex<Rat>(c, lam, w);
      cl.add("graded piece acyclic " + lab + " lambda=" + rat_str(lam), r.all_acyclic);
    }
    std::vector<Rat> lam_frac = fracs;
    if (params.contains("lambda_fractional"))
      lam_frac = rat_list(params.at("lambda_fractional"), "local-verify.lambda_fractional");
    for (const Rat& lam : lam_frac) {
      if (lam.get_den() == 1)
        throw PlanError("local-verify.lambda_fractional: entries must be non-integral");
      GrComplexResult<Rat> r = gr_complex<Rat>(c, lam, w);
      cl.add("graded piece supported on the reduced divisor " + lab + " lambda=" + rat_str(lam),
             r.supported_on_pred);
    }

    {
      C1Verdict v = verify_C1_sequence<Rat>(c, w);
      Json wit = Json::array();
      for (auto& f : v.failures) {
        Json fj;
        fj["p"] = f.p;
        fj["anchor"] = json_of_dims(f.a);
        fj["what"] = f.what;
        wit.push_back(fj);
      }
      cl.add("three-term sequence exact with acyclic relative complex " + lab,
             v.pass && v.termwise_exact && v.bar_acyclic && v.sigma_strict, wit);
    }

    bool reduced = true;
    for (int e : c.e) reduced = reduced && e == 1;
    if (c.ell >= 1 && reduced) {
      for (int p = 0; p <= c.n(); ++p) {
        QuotientLemmaResult<Rat> q = quotient_cohomology_lemma<Rat>(c, p, w);
        Json wit;
        wit["dim_at_zero"] = q.dim_at_zero;
        wit["expected"] = (long long)q.expected;
        cl.add("quotient cohomology count " + lab + " p=" + std::to_string(p), q.pass, wit);
      }
    }

    Json tb;
    tb["chart"] = lab;
    tb["slice_bound"] = bound;
    tb["checks_run"] = (int)cl.checks.size() - checks_before;
    tables.push_back(tb);
  }

  TaskResult res;
  res.report["tables"] = tables;
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: charp-cartier — over F_p on a monomial chart: the closed-forms
// intersection identity and bijectivity of the inverse Cartier map on
// f-adapted slice cohomology, per form degree.
// ---------------------------------------------------------------------------

namespace clidetail {

inline Json json_of_slice_failures(const std::vector<SliceCheck>& slices) {
  Json fails = Json::array();
  for (auto& s : slices)
    if (!s.ok) {
      Json f;
      f["degree"] = json_of_dims(s.deg);
      f["lhs_dim"] = s.lhs_dim;
      f["rhs_dim"] = s.rhs_dim;
      fails.push_back(f);
    }
  return fails;
}

}  // namespace clidetail

inline TaskResult task_charp_cartier(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  (void)opts;
  expect_object(params, "charp-cartier");
  int pp = get_int(params, "p", "charp-cartier");
  try {
    Fp::require_prime(pp);
  } catch (const std::exception& e) {
    throw PlanError(std::string("charp-cartier: ") + e.what());
  }
  if (!params.contains("chart")) throw PlanError("charp-cartier: missing required key \"chart\"");
  MonomialChart ch = charp_chart_from_json(params.at("chart"), "charp-cartier.chart");
  std::vector<int> degrees;
  for (int a = 0; a <= ch.n; ++a) degrees.push_back(a);
  if (params.contains("degrees"))
    degrees = int_list(params.at("degrees"), "charp-cartier.degrees");
  int window = get_int_or(params, "window", 2, "charp-cartier");
  if (window < 0) throw PlanError("charp-cartier.window: must be >= 0");

  CheckList cl;
  Json tables = Json::array();
  for (int a : degrees) {
    if (a < 0 || a > ch.n)
      throw PlanError("charp-cartier.degrees: degree out of range for the chart");
    IntersectionReport ir = verify_closed_intersection(ch, a, pp, window);
    CartierReport cr = verify_cartier_iso_omega_f(ch, a, pp, window);
    Json tb;
    tb["degree"] = a;
    tb["slices_checked"] = (int)ir.slices.size();
    tb["intersection_failures"] = json_of_slice_failures(ir.slices);
    tb["cartier_failures"] = json_of_slice_failures(cr.slices);
    tables.push_back(tb);
    std::string at = " in degree " + std::to_string(a);
    cl.add("closed forms meet the adapted subcomplex as expected" + at, ir.all_ok,
           json_of_slice_failures(ir.slices));
    cl.add("inverse Cartier images closed" + at, cr.images_closed);
    cl.add("inverse Cartier images f-adapted" + at, cr.images_in_omega_f);
    cl.add("inverse Cartier bijective on slice cohomology" + at, cr.all_ok,
           json_of_slice_failures(cr.slices));
  }

  TaskResult res;
  res.report["p"] = pp;
  res.report["reduced_poles"] = ch.poles_reduced();
  res.report["tables"] = tables;
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: charp-splitting — Frobenius lifts on a W2 atlas, the pole-divisor
// u-sum identity, and the degreewise splitting verdicts.
// ---------------------------------------------------------------------------

namespace clidetail {

inline MPoly<Fp> fp_mpoly_from_json(const Json& j, int n, long p, const std::string& where) {
  if (!j.is_array()) throw PlanError(where + ": expected an array of [coeff, [exponents]] terms");
  MPoly<Fp> out = MPoly<Fp>::zero(n);
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& t = j.at(i);
    std::string at = where + "[" + std::to_string(i) + "]";
    if (!t.is_array() || t.size() != 2 || !t.at(0).is_number_integer())
      throw PlanError(at + ": expected [coeff, [exponents]]");
    std::vector<int> e = int_list(t.at(1), at + "[1]");
    if ((int)e.size() != n) throw PlanError(at + ": exponent vector must have length n");
    out = out + MPoly<Fp>::monomial(n, e, Fp(t.at(0).get<long>(), p));
  }
  return out;
}

}  // namespace clidetail

inline TaskResult task_charp_splitting(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  (void)opts;
  expect_object(params, "charp-splitting");
  int pp = get_int(params, "p", "charp-splitting");
  try {
    Fp::require_prime(pp);
  } catch (const std::exception& e) {
    throw PlanError(std::string("charp-splitting: ") + e.what());
  }
  std::string kind = "P1";
  if (params.contains("atlas")) {
    if (!params.at("atlas").is_string())
      throw PlanError("charp-splitting.atlas: expected a string");
    kind = params.at("atlas").get<std::string>();
  }

  W2Atlas atlas;
  if (kind == "P1") {
    std::vector<int> fexp = {1};
    if (params.contains("fexp")) fexp = int_list(params.at("fexp"), "charp-splitting.fexp");
    if (fexp.size() != 1 || fexp[0] == 0)
      throw PlanError("charp-splitting: the projective-line atlas needs fexp = [e] with e != 0");
    bool horiz = get_bool_or(params, "horizontal_at_zero", false, "charp-splitting");
    try {
      atlas = W2Atlas::proj_line(pp, fexp[0], horiz);
    } catch (const std::exception& e) {
      throw PlanError(std::string("charp-splitting: ") + e.what());
    }
  } else if (kind == "A1" || kind == "An" || kind == "A1x2" || kind == "Anx2") {
    if (!params.contains("chart"))
      throw PlanError("charp-splitting: affine atlases need a \"chart\" object");
    MonomialChart ch = charp_chart_from_json(params.at("chart"), "charp-splitting.chart");
    if ((kind == "A1" || kind == "A1x2") && ch.n != 1)
      throw PlanError("charp-splitting: atlas " + kind + " needs a one-dimensional chart");
    atlas = (kind == "A1x2" || kind == "Anx2") ? W2Atlas::doubled(pp, ch)
                                               : W2Atlas::single(pp, ch);
  } else {
    throw PlanError("charp-splitting.atlas: unknown atlas \"" + kind +
                    "\" (expected A1, An, A1x2, Anx2, or P1)");
  }

  std::vector<LiftPerturbation> perts;
  if (params.contains("perturbations")) {
    const Json& arr = params.at("perturbations");
    if (!arr.is_array()) throw PlanError("charp-splitting.perturbations: expected an array");
    for (size_t i = 0; i < arr.size(); ++i) {
      std::string at = "charp-splitting.perturbations[" + std::to_string(i) + "]";
      const Json& e = expect_object(arr.at(i), at);
      LiftPerturbation lp;
      lp.chart = get_int(e, "chart", at);
      lp.coord = get_int(e, "coord", at);
      if (lp.chart < 0 || lp.chart >= atlas.size())
        throw PlanError(at + ": chart index out of range");
      if (!e.contains("u")) throw PlanError(at + ": missing required key \"u\"");
      lp.u = fp_mpoly_from_json(e.at("u"), atlas.charts[lp.chart].n, pp, at + ".u");
      perts.push_back(lp);
    }
  }

  int i_max = get_int_or(params, "i_max", std::min(2, (int)pp - 1), "charp-splitting");
  if (i_max < 1 || i_max >= pp)
    throw PlanError("charp-splitting.i_max: need 1 <= i_max < p");
  int window = get_int_or(params, "window", 2, "charp-splitting");
  if (window < 0) throw PlanError("charp-splitting.window: must be >= 0");

  CheckList cl;
  Json tables = Json::array();
  FrobLift lift;
  bool lift_ok = true;
  try {
    lift = build_frob_lift_unchecked(atlas, perts);
  } catch (const std::exception& e) {
    throw PlanError(std::string("charp-splitting.perturbations: ") + e.what());
  }
  for (int a = 0; a < atlas.size(); ++a) {
    if (!atlas.charts[a].meets_poles()) continue;
    USumReport us = verify_u_sum(atlas, lift, a);
    cl.add("lift pulls the function back to its p-th power on chart " + std::to_string(a), us.ok,
           json_of_mpoly(us.residual));
    lift_ok = lift_ok && us.ok;
  }

  if (lift_ok) {
    for (int i = 1; i <= i_max; ++i) {
      SplittingReport rep = assemble_splitting(atlas, lift, i, window);
      Json tb;
      tb["i"] = i;
      tb["canonical_exact"] = rep.canonical_exact;
      Json notes = Json::array();
      for (auto& n : rep.notes) notes.push_back(n);
      tb["notes"] = notes;
      tables.push_back(tb);
      std::string at = " at level " + std::to_string(i);
      cl.add("splitting cochain identities" + at, rep.cocycle_ok, notes);
      cl.add("splitting images are f-adapted" + at, rep.membership_ok, notes);
      cl.add("adapted forms land in closed cochains" + at, rep.containment_ok, notes);
      cl.add("splitting classes match the inverse Cartier map" + at, rep.matches_cartier, notes);
    }
  }

  TaskResult res;
  res.report["p"] = pp;
  res.report["atlas"] = kind;
  res.report["charts"] = atlas.size();
  res.report["tables"] = tables;
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: charp-degeneration — over F_p on the projective line: dimensions of
// the twisted complex with and without differential agree.
// ---------------------------------------------------------------------------

inline TaskResult task_charp_degeneration(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  expect_object(params, "charp-degeneration");
  int pp = get_int(params, "p", "charp-degeneration");
  try {
    Fp::require_prime(pp);
  } catch (const std::exception& e) {
    throw PlanError(std::string("charp-degeneration: ") + e.what());
  }
  bool horiz = get_bool_or(params, "horizontal_at_zero", false, "charp-degeneration");
  int T = get_int_or(params, "truncation", opts.truncation, "charp-degeneration");

  CharpDegenerationReport rep = charp_degeneration_dims(pp, horiz, T);
  TaskResult res;
  res.report["p"] = pp;
  Json tb;
  tb["dims_with_d"] = clidetail::json_of_dims(rep.dims_d);
  tb["dims_zero_differential"] = clidetail::json_of_dims(rep.dims_zero);
  tb["stable"] = rep.stable_d && rep.stable_zero;
  if (!rep.note.empty()) tb["note"] = rep.note;
  res.report["tables"] = Json::array({tb});
  CheckList cl;
  cl.add("windows stabilize over F_p", rep.stable_d && rep.stable_zero, Json(rep.note));
  cl.add("dimensions agree with and without differential", rep.equal, tb);
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Task: filtcx-fuzz — seeded random filtered complexes through the triple
// equivalence; any disagreement is a counterexample reported verbatim.
// ---------------------------------------------------------------------------

inline TaskResult task_filtcx_fuzz(const Json& params, const RunOptions& opts) {
  using namespace clidetail;
  expect_object(params, "filtcx-fuzz");
  uint64_t seed = opts.seed;
  if (params.contains("seed")) {
    if (!params.at("seed").is_number_integer())
      throw PlanError("filtcx-fuzz.seed: must be an integer");
    seed = params.at("seed").get<uint64_t>();
  }
  int count = get_int_or(params, "count", 200, "filtcx-fuzz");
  if (count < 1) throw PlanError("filtcx-fuzz.count: must be >= 1");
  int max_dim = get_int_or(params, "max_dim", 12, "filtcx-fuzz");
  if (max_dim < 1) throw PlanError("filtcx-fuzz.max_dim: must be >= 1");
  // Test fixture: deliberately corrupt the consistency verdict so the
  // counterexample path (serialized witness, nonzero exit) can be exercised.
  bool corrupt = get_bool_or(params, "corrupt_checker", false, "filtcx-fuzz");

  SplitMix64 rng(seed);
  int agreed = 0;
  Json witnesses = Json::array();
  int counterexamples = 0;
  for (int i = 0; i < count; ++i) {
    FilteredComplex<Rat> fc = random_filtered_complex(rng, max_dim);
    TripleVerdict v = triple_equivalence(fc);
    if (corrupt) v.e1_counts = !v.e1_counts;
    if (v.agree()) {
      ++agreed;
    } else {
      ++counterexamples;
      if (witnesses.size() < 3) {
        Json w;
        w["index"] = i;
        w["verdicts"] = json_of_triple(v);
        w["complex"] = json_of_filtered(fc);
        witnesses.push_back(w);
      }
    }
  }

  TaskResult res;
  res.report["seed"] = (long long)seed;
  res.report["count"] = count;
  res.report["agreed"] = agreed;
  res.report["counterexamples"] = counterexamples;
  if (corrupt) res.report["corrupt_checker"] = true;
  res.report["witnesses"] = witnesses;
  CheckList cl;
  cl.add("three degeneration criteria agree on every sample", counterexamples == 0, witnesses);
  res.report["checks"] = cl.checks;
  res.ok = cl.ok;
  return res;
}

// ---------------------------------------------------------------------------
// Dispatch, plan execution, rendering
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& task_kinds() {
  static const std::vector<std::string> kinds = {
      "local-verify",   "p1-hodge",        "p1-degeneration",    "p1-uv",
      "charp-cartier",  "charp-splitting", "charp-degeneration", "filtcx-fuzz"};
  return kinds;
}

inline TaskResult run_task(const std::string& kind, const Json& params, const RunOptions& opts) {
  if (kind == "p1-uv") return task_p1_uv(params, opts);
  if (kind == "p1-hodge") return task_p1_hodge(params, opts);
  if (kind == "p1-degeneration") return task_p1_degeneration(params, opts);
  if (kind == "local-verify") return task_local_verify(params, opts);
  if (kind == "charp-cartier") return task_charp_cartier(params, opts);
  if (kind == "charp-splitting") return task_charp_splitting(params, opts);
  if (kind == "charp-degeneration") return task_charp_degeneration(params, opts);
  if (kind == "filtcx-fuzz") return task_filtcx_fuzz(params, opts);
  throw PlanError("unknown task kind \"" + kind + "\"");
}

struct PlanResult {
  Json report;
  bool ok = true;
};

inline PlanResult run_plan(const Json& plan, const RunOptions& opts) {
  clidetail::expect_object(plan, "plan");
  Json tasks = Json::array();
  if (plan.contains("tasks")) {
    tasks = plan.at("tasks");
    if (!tasks.is_array()) throw PlanError("plan.tasks: expected an array");
  }
  struct Slot {
    std::string kind;
    Json params;
    TaskResult result;
    double elapsed_ms = 0;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    const std::string where = "plan.tasks[" + std::to_string(i) + "]";
    const Json& t = clidetail::expect_object(tasks.at(i), where);
    if (!t.contains("kind") || !t.at("kind").is_string())
      throw PlanError(where + ": missing string key \"kind\"");
    slots[i].kind = t.at("kind").get<std::string>();
    slots[i].params = t.contains("params") ? t.at("params") : Json::object();
  }

  auto work = [&](size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      slots[i].result = run_task(slots[i].kind, slots[i].params, opts);
    } catch (...) {
      slots[i].error = std::current_exception();
    }
    auto t1 = std::chrono::steady_clock::now();
    slots[i].elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  };

  int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || slots.size() <= 1) {
    for (size_t i = 0; i < slots.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int nthreads = std::min<size_t>(jobs, slots.size());
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < slots.size(); i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }

  // Re-raise the first task error in plan order (schema problems inside a
  // task are usage errors, not FAIL verdicts).
  for (auto& s : slots)
    if (s.error) std::rethrow_exception(s.error);

  PlanResult out;
  // Only computation inputs are echoed; execution details (job count) must
  // not change the report bytes.
  out.report["options"]["seed"] = (long long)opts.seed;
  out.report["options"]["truncation"] = opts.truncation;
  Json jtasks = Json::array();
  int passed = 0;
  for (size_t i = 0; i < slots.size(); ++i) {
    Json jt;
    jt["index"] = (int)i;
    jt["kind"] = slots[i].kind;
    jt["ok"] = slots[i].result.ok;
    jt["params"] = slots[i].params;
    for (auto& [k, v] : slots[i].result.report.items()) jt[k] = v;
    if (opts.timings) jt["elapsed_ms"] = slots[i].elapsed_ms;
    jtasks.push_back(jt);
    out.ok = out.ok && slots[i].result.ok;
    if (slots[i].result.ok) ++passed;
  }
  out.report["tasks"] = jtasks;
  out.report["counts"]["tasks"] = (int)slots.size();
  out.report["counts"]["passed"] = passed;
  out.report["counts"]["failed"] = (int)slots.size() - passed;
  out.report["ok"] = out.ok;
  return out;
}

// ---------------------------------------------------------------------------
// Output formats: JSON is canonical; CSV and text are projections.
// ---------------------------------------------------------------------------

namespace clidetail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace clidetail

inline std::string render_report(const Json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  if (format == "csv") {
    std::ostringstream os;
    os << "task,kind,check,pass\n";
    for (auto& t : report.at("tasks")) {
      for (auto& c : t.at("checks"))
        os << t.at("index").get<int>() << ',' << t.at("kind").get<std::string>() << ','
           << clidetail::csv_escape(c.at("name").get<std::string>()) << ','
           << (c.at("pass").get<bool>() ? "true" : "false") << '\n';
    }
    return os.str();
  }
  if (format == "text") {
    std::ostringstream os;
    const Json& tasks = report.at("tasks");
    for (auto& t : tasks) {
      os << (t.at("ok").get<bool>() ? "PASS" : "FAIL") << "  task " << t.at("index").get<int>()
         << "  " << t.at("kind").get<std::string>() << "\n";
      for (auto& c : t.at("checks"))
        os << "  " << (c.at("pass").get<bool>() ? "pass" : "FAIL") << "  "
           << c.at("name").get<std::string>() << "\n";
    }
    const Json& counts = report.at("counts");
    os << "tasks: " << counts.at("tasks").get<int>() << "  passed: "
       << counts.at("passed").get<int>() << "  failed: " << counts.at("failed").get<int>() << "\n";
    os << "RESULT: " << (report.at("ok").get<bool>() ? "PASS" : "FAIL") << "\n";
    return os.str();
  }
  throw PlanError("unknown output format \"" + format + "\" (expected json, csv, or text)");
}

// Built-in demonstration parameters used when a task subcommand is invoked
// without a parameter file.
inline Json default_task_params(const std::string& kind) {
  Json p = Json::object();
  if (kind == "p1-uv" || kind == "p1-hodge" || kind == "p1-degeneration") {
    p["f"]["num"] = Json::array({1, 0, 1});  // z + 1/z = (1 + z^2)/z
    p["f"]["den"] = Json::array({0, 1});
  } else if (kind == "local-verify") {
    Json c;
    c["ell"] = 2;
    c["m"] = 1;
    c["pz"] = 0;
    c["e"] = Json::array({1, 2});
    p["charts"] = Json::array({c});
  } else if (kind == "charp-cartier") {
    p["p"] = 3;
    p["chart"]["n"] = 1;
    p["chart"]["fexp"] = Json::array({-1});
    p["chart"]["m"] = 1;
    p["window"] = 4;
  } else if (kind == "charp-splitting") {
    p["p"] = 5;
    p["atlas"] = "P1";
    p["fexp"] = Json::array({1});
    p["i_max"] = 1;
  } else if (kind == "charp-degeneration") {
    p["p"] = 5;
    p["horizontal_at_zero"] = true;
  } else if (kind == "filtcx-fuzz") {
    p["count"] = 50;
    p["max_dim"] = 10;
  }
  return p;
}

}  // namespace irrhodge
