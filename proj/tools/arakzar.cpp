// arakzar: command-line front end for the toric arithmetic-surface library.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "arakzar/errors.hpp"
#include "arakzar/fiber_config.hpp"
#include "arakzar/intersection.hpp"
#include "arakzar/json_io.hpp"
#include "arakzar/numeric.hpp"
#include "arakzar/positivity_zariski.hpp"
#include "arakzar/random_family.hpp"
#include "arakzar/volumes.hpp"

namespace {

using namespace arakzar;
using Clock = std::chrono::steady_clock;

struct Common {
  double tol = 1e-6;
  int grid_points = 4001;
  double window = 0.0;
  std::string out;
  std::string csv_dir;
  bool timing = false;

  PositivityOptions positivity() const {
    PositivityOptions o;
    o.curve = curve();
    o.equality_tol = tol;
    return o;
  }
  CurveOptions curve() const {
    CurveOptions c;
    c.grid_points = grid_points;
    c.window = window;
    return c;
  }
};

void emit(const Json& j, const Common& c) {
  const std::string text = j.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw InputError("cannot write " + c.out);
  f << text;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void write_csv(const std::string& dir, const std::string& name, const std::vector<std::pair<double, double>>& rows,
               const char* header) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path.string());
  f.precision(17);
  f << header << "\n";
  for (const auto& [a, b] : rows) f << a << "," << b << "\n";
}

void dump_samples(const ToricArithDivisor& d, const OkounkovData& ok, const Common& c) {
  if (c.csv_dir.empty()) return;
  const auto [lo, hi] = sampling_window(d.green(), c.curve());
  const double pad = 0.1 * (hi - lo) + 1.0;
  std::vector<std::pair<double, double>> u_rows, q_rows, g_rows;
  const auto ts = numeric::linspace(lo - pad, hi + pad, 801);
  for (double t : ts) u_rows.emplace_back(t, d.green()(t));
  if (d.degree() >= 0.0) {
    const GreenCurve q = convex_envelope(d.green(), c.curve());
    for (double t : ts) q_rows.emplace_back(t, q(t));
    write_csv(c.csv_dir, "envelope.csv", q_rows, "t,q");
  }
  write_csv(c.csv_dir, "u.csv", u_rows, "t,u");
  for (const auto& row : g_samples(ok, 401)) g_rows.emplace_back(row[0].get<double>(), row[1].get<double>());
  write_csv(c.csv_dir, "G.csv", g_rows, "x,G");
}

// ---- analyze ---------------------------------------------------------------

int run_analyze(const std::string& path, const Common& c) {
  const auto t0 = Clock::now();
  const Json input = read_json_file(path);
  const ToricArithDivisor d = parse_divisor(input);
  const PositivityOptions opts = c.positivity();
  const OkounkovData ok(d, opts.curve);
  const auto [v, vchi] = volumes(ok);
  const bool integrable = is_integrable(d);

  Json report = {{"schema", kReportSchema}, {"command", "analyze"}, {"input", input}};
  report["deg_self"] = integrable ? Json(intersect(d, d, opts.pairing)) : Json(nullptr);
  report["vol"] = v;
  report["vol_chi"] = vchi;
  const bool psef = is_pseudo_effective(d, ok);
  report["predicates"] = {{"nef", is_nef(d, ok, opts.curve)},
                          {"relatively_nef", is_relatively_nef(d, opts.curve)},
                          {"pseudo_effective", psef},
                          {"big", v > 0.0},
                          {"integrable", integrable},
                          {"effective", is_effective(d, opts.curve)}};
  report["okounkov"] = {{"delta", to_json(ok.delta())}, {"theta", to_json(ok.theta())}, {"G_samples", g_samples(ok)}};
  report["zariski"] = psef && integrable ? to_json(zariski(d, opts)) : Json(nullptr);
  report["mu"] = {{"at_H0", number(asymptotic_mult(d, ok, Section::H0))},
                  {"at_H1", number(asymptotic_mult(d, ok, Section::H1))}};
  dump_samples(d, ok, c);
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return 0;
}

// ---- volume ----------------------------------------------------------------

int run_volume(const std::string& path, const Common& c) {
  const auto t0 = Clock::now();
  const ToricArithDivisor d = parse_divisor(read_json_file(path));
  const OkounkovData ok(d, c.curve());
  const auto [v, vchi] = volumes(ok);
  Json report = {{"schema", kReportSchema},
                 {"command", "volume"},
                 {"delta", to_json(ok.delta())},
                 {"theta", to_json(ok.theta())},
                 {"vol", v},
                 {"vol_chi", vchi},
                 {"G_samples", g_samples(ok)}};
  dump_samples(d, ok, c);
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return 0;
}

// ---- intersect -------------------------------------------------------------

int run_intersect(const std::string& a, const std::string& b, const Common& c) {
  const auto t0 = Clock::now();
  const ToricArithDivisor d1 = parse_divisor(read_json_file(a));
  const ToricArithDivisor d2 = parse_divisor(read_json_file(b));
  Json report = {{"schema", kReportSchema}, {"command", "intersect"}, {"deg", intersect(d1, d2)}};
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return 0;
}

// ---- zariski ---------------------------------------------------------------

int run_zariski(const std::string& path, const Common& c) {
  const auto t0 = Clock::now();
  const ToricArithDivisor d = parse_divisor(read_json_file(path));
  Json report = to_json(zariski(d, c.positivity()));
  report["schema"] = kReportSchema;
  report["command"] = "zariski";
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return 0;
}

// ---- fiber-decompose -------------------------------------------------------

int run_fiber(const std::string& path, const Common& c) {
  const auto t0 = Clock::now();
  const FiberProblem prob = parse_fiber_problem(read_json_file(path));
  Json report = to_json(greatest_pi_nef(prob.cfg, prob.data), prob.cfg);
  report["command"] = "fiber-decompose";
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return 0;
}

// ---- count-sections --------------------------------------------------------

int run_count(const std::string& path, int m, int m_max, const Common& c) {
  const auto t0 = Clock::now();
  const ToricArithDivisor d = parse_divisor(read_json_file(path));
  const OkounkovData ok(d, c.curve());
  const auto [v, vchi] = volumes(ok);
  std::vector<int> ms;
  if (m > 0) {
    ms.push_back(m);
  } else {
    for (int x : {1, 2, 5, 10, 25, 50, 100, 200, 400, 800})
      if (x <= m_max) ms.push_back(x);
  }
  CountOptions copts;
  copts.curve = c.curve();
  Json rows = Json::array();
  for (int k : ms) {
    const SectionCount sc = count_sections(d, ok, k, copts);
    const ChiBracket chi = chi_estimate(d, ok, k);
    Json row = to_json(sc);
    row["m"] = k;
    row["monomials"] = sc.ks.size();
    row["vol_estimate"] = 2.0 * sc.log_count_upper / (double(k) * k);
    row["chi"] = {chi.lower, chi.upper};
    row["vol_chi_estimate"] = 2.0 * chi.upper / (double(k) * k);
    rows.push_back(row);
  }
  Json report = {{"schema", kReportSchema}, {"command", "count-sections"}, {"vol", v}, {"vol_chi", vchi}, {"counts", rows}};
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return 0;
}

// ---- reproduce-example -----------------------------------------------------

double phi(double x, double a0, double a1) {
  auto xlogx = [](double y) { return y > 0.0 ? y * std::log(y) : 0.0; };
  return -xlogx(1.0 - x) - xlogx(x) + (1.0 - x) * std::log(a0) + x * std::log(a1);
}

int run_reproduce(double a0, double a1, bool json_out, const Common& c) {
  if (!(a0 > 0.0 && a0 < 1.0 && a1 > 0.0 && a1 < 1.0 && a0 + a1 >= 1.0))
    throw InputError("reproduce-example needs 0 < a0 < 1, 0 < a1 < 1 and a0 + a1 >= 1");
  const auto t0 = Clock::now();
  const PositivityOptions opts = c.positivity();
  const ToricArithDivisor d = horizontal(1.0, 0.0, GreenCurve::logexp(a0, a1));
  const ZariskiReport z = zariski(d, opts);
  const double vt = z.theta.lo;
  const double th = z.theta.hi;

  const NegativePiece* n1 = nullptr;
  const NegativePiece* n2 = nullptr;
  for (const auto& piece : z.N_pieces) {
    if (piece.label == "H1") n1 = &piece;
    if (piece.label == "H0") n2 = &piece;
  }
  const ToricArithDivisor zero;
  const ToricArithDivisor& N1 = n1 ? n1->divisor : zero;
  const ToricArithDivisor& N2 = n2 ? n2->divisor : zero;

  const double bp1 = std::log(a0 * vt / (a1 * (1.0 - vt)));
  const double bp2 = std::log(a0 * th / (a1 * (1.0 - th)));
  const double pn1 = intersect(z.P, N1, opts.pairing);
  const double pn2 = intersect(z.P, N2, opts.pairing);
  const double n1n2 = intersect(N1, N2, opts.pairing);
  const double n1n1 = intersect(N1, N1, opts.pairing);
  const double n2n2 = intersect(N2, N2, opts.pairing);
  const double pp = intersect(z.P, z.P, opts.pairing);
  auto xlogx = [](double y) { return y > 0.0 ? y * std::log(y) : 0.0; };
  const double n1_closed = (xlogx(1.0 - vt) + (std::log(a0) + 1.0) * vt) / 2.0;
  const double n2_closed = (xlogx(th) + (std::log(a1) + 1.0) * (1.0 - th)) / 2.0;
  const auto eig = symmetric_eigenvalues({{n1n1, n1n2}, {n1n2, n2n2}});

  const bool degenerate = th - vt <= 0.0;
  std::vector<std::pair<std::string, bool>> checks = {
      {"phi(vartheta) = 0", std::abs(phi(vt, a0, a1)) <= 1e-10},
      {"phi(theta) = 0", std::abs(phi(th, a0, a1)) <= 1e-10},
      {"N1^2 closed form", std::abs(n1n1 - n1_closed) <= 1e-6},
      {"N2^2 closed form", std::abs(n2n2 - n2_closed) <= 1e-6},
      {"P.N1 = 0", std::abs(pn1) <= 1e-6},
      {"P.N2 = 0", std::abs(pn2) <= 1e-6},
      {"N1.N2 = 0", std::abs(n1n2) <= 1e-6},
      {"Gram negative definite", eig.back() < -1e-9},
      {"vol(P) = vol(D)", std::abs(z.vol_P - z.vol_D) <= 1e-6},
  };
  if (degenerate) checks.push_back({"vol = 0 on a single-point Theta", std::abs(z.vol_D) <= 1e-9});
  bool all_ok = true;
  for (const auto& [_, ok] : checks) all_ok = all_ok && ok;

  Json samples = Json::array();
  for (double t : {bp1, bp2})
    samples.push_back({{"t", t}, {"abs_z", std::exp(t / 2.0)}, {"p", z.P.green()(t)}, {"n1", N1.green()(t)}, {"n2", N2.green()(t)}});
  Json report = {{"schema", kReportSchema},
                 {"command", "reproduce-example"},
                 {"a0", a0},
                 {"a1", a1},
                 {"vartheta", vt},
                 {"theta", th},
                 {"breakpoints_abs_z", {std::exp(bp1 / 2.0), std::exp(bp2 / 2.0)}},
                 {"profile_samples", samples},
                 {"pairings",
                  {{"P.P", pp}, {"P.N1", pn1}, {"P.N2", pn2}, {"N1.N1", n1n1}, {"N1.N2", n1n2}, {"N2.N2", n2n2}}},
                 {"closed_forms", {{"N1.N1", n1_closed}, {"N2.N2", n2_closed}}},
                 {"gram", {{n1n1, n1n2}, {n1n2, n2n2}}},
                 {"gram_eigenvalues", eig},
                 {"vol_D", z.vol_D},
                 {"vol_P", z.vol_P},
                 {"deg_self_D", z.deg_self_D},
                 {"deg_N_self", z.n_self}};
  Json check_json = Json::object();
  for (const auto& [name, ok] : checks) check_json[name] = ok;
  report["checks"] = check_json;
  report["all_checks_pass"] = all_ok;
  if (c.timing) report["timing_ms"] = ms_since(t0);

  if (json_out || !c.out.empty()) emit(report, c);
  if (!json_out) {
    std::ostringstream s;
    s.precision(12);
    s << "a0 = " << a0 << ", a1 = " << a1 << "\n";
    s << "vartheta            " << vt << "\n";
    s << "theta               " << th << "\n";
    s << "breakpoints |z|     " << std::exp(bp1 / 2.0) << "  " << std::exp(bp2 / 2.0) << "\n";
    for (const auto& row : samples)
      s << "  at |z| = " << row["abs_z"].get<double>() << ": p = " << row["p"].get<double>()
        << ", n1 = " << row["n1"].get<double>() << ", n2 = " << row["n2"].get<double>() << "\n";
    s << "deg(P.P)            " << pp << "\n";
    s << "deg(P.N1)           " << pn1 << "\n";
    s << "deg(P.N2)           " << pn2 << "\n";
    s << "deg(N1.N2)          " << n1n2 << "\n";
    s << "deg(N1.N1)          " << n1n1 << "   closed form " << n1_closed << "\n";
    s << "deg(N2.N2)          " << n2n2 << "   closed form " << n2_closed << "\n";
    s << "Gram                [[" << n1n1 << ", " << n1n2 << "], [" << n1n2 << ", " << n2n2 << "]]\n";
    s << "vol(D) = vol(P)     " << z.vol_D << "  " << z.vol_P << "\n";
    s << "deg(D^2)            " << z.deg_self_D << "\n";
    for (const auto& [name, ok] : checks) s << (ok ? "ok    " : "FAIL  ") << name << "\n";
    std::cout << s.str();
  }
  if (!all_ok) throw PropertyViolation("reproduce-example: closed-form identities failed");
  return 0;
}

// ---- verify ----------------------------------------------------------------

struct CaseOutcome {
  std::string family;
  std::string category;
  bool pass = false;
  std::string detail;
};

CaseOutcome check_divisor(const RandomCase& rc, const PositivityOptions& opts) {
  CaseOutcome out{"divisor", rc.category, false, {}};
  try {
    const TheoremCheck tc = verify_main_theorem(rc.divisor, opts);
    out.pass = tc.all();
    if (rc.divisor.degree() <= opts.equality_tol && tc.deg_self > opts.strict_margin) {
      out.pass = false;
      out.detail = "Hodge index violated";
    }
    if (!out.pass && out.detail.empty()) {
      std::ostringstream s;
      s << "flags chi/vol/nef/zariski = " << tc.thm_2_1 << tc.thm_4_3 << tc.cor_4_4 << tc.thm_5_1;
      out.detail = s.str();
    }
  } catch (const std::exception& e) {
    out.detail = e.what();
  }
  return out;
}

CaseOutcome check_fiber(std::uint64_t seed, int index) {
  CaseOutcome out{"fiber", "random", false, {}};
  try {
    Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1)));
    const int r = 2 + static_cast<int>(rng() % 5);
    const FiberConfiguration cfg = random_fiber_configuration(rng, r);
    if (!validate(cfg).ok) {
      out.detail = "generator produced an invalid configuration";
      return out;
    }
    const VerticalDivisorData data = random_vertical_data(rng, cfg);
    const PiNefResult res = greatest_pi_nef(cfg, data);
    double ratio = 1e300;
    for (int i = 0; i < r; ++i) ratio = std::min(ratio, res.n(i) / cfg.mult(i));
    const bool slack_ok = res.slack.minCoeff() >= -1e-12;
    const bool comp_ok = std::abs(res.n.dot(res.slack)) <= 1e-12 * (1.0 + res.n.cwiseAbs().sum());
    const bool n_ok = res.n.minCoeff() >= -1e-12 && ratio <= 1e-12;
    out.pass = slack_ok && comp_ok && n_ok;
    if (!out.pass) out.detail = "LCP post-conditions failed";
  } catch (const std::exception& e) {
    out.detail = e.what();
  }
  return out;
}

int run_verify(std::uint64_t seed, int count, const Common& c) {
  const auto t0 = Clock::now();
  if (count < 0) throw InputError("--count must be >= 0");
  const PositivityOptions opts = c.positivity();
  std::vector<RandomCase> cases = positive_degree_family(seed, count);
  for (auto& rc : degree_zero_family(seed + 1, count / 2)) cases.push_back(std::move(rc));
  const int n_div = static_cast<int>(cases.size());
  const int n_fib = count / 2;
  std::vector<CaseOutcome> outcomes(static_cast<std::size_t>(n_div + n_fib));
  parallel_for(n_div + n_fib, [&](int i) {
    outcomes[static_cast<std::size_t>(i)] =
        i < n_div ? check_divisor(cases[static_cast<std::size_t>(i)], opts) : check_fiber(seed, i - n_div);
  });

  int pass = 0;
  std::map<std::string, std::pair<int, int>> by_category;
  Json failures = Json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    auto& tally = by_category[o.family + ":" + o.category];
    ++tally.second;
    if (o.pass) {
      ++pass;
      ++tally.first;
    } else {
      failures.push_back({{"index", i}, {"family", o.family}, {"category", o.category}, {"detail", o.detail}});
    }
  }
  Json cats = Json::object();
  for (const auto& [k, v] : by_category) cats[k] = {{"pass", v.first}, {"total", v.second}};
  const int total = static_cast<int>(outcomes.size());
  Json report = {{"schema", kReportSchema},
                 {"command", "verify"},
                 {"seed", seed},
                 {"count", count},
                 {"tol", c.tol},
                 {"cases", total},
                 {"pass", pass},
                 {"fail", total - pass},
                 {"by_category", cats},
                 {"failures", failures}};
  if (c.timing) report["timing_ms"] = ms_since(t0);
  emit(report, c);
  return pass == total ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arithmetic intersection numbers, volumes and Zariski decompositions on P^1 over Z"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--tol", common.tol, "Equality tolerance for deg^2 versus volumes")->default_val(1e-6);
  app.add_option("--grid-points", common.grid_points, "Samples for grid-backed curve operations")->default_val(4001);
  app.add_option("--window", common.window, "Half-width of the sampling window (0 = automatic)")->default_val(0.0);
  app.add_option("--out", common.out, "Write JSON here instead of stdout");
  app.add_option("--csv-dir", common.csv_dir, "Directory for u / envelope / G sample CSVs");
  app.add_flag("--timing", common.timing, "Add wall-clock timing to reports");
  app.fallthrough();

  std::string path, path2;
  auto* analyze = app.add_subcommand("analyze", "Full analysis report of a divisor");
  analyze->add_option("config", path, "Divisor JSON")->required();

  auto* volume = app.add_subcommand("volume", "Okounkov data and volumes");
  volume->add_option("config", path, "Divisor JSON")->required();

  auto* inter = app.add_subcommand("intersect", "Intersection number of two divisors");
  inter->add_option("first", path, "Divisor JSON")->required();
  inter->add_option("second", path2, "Divisor JSON")->required();

  auto* zar = app.add_subcommand("zariski", "Zariski decomposition report");
  zar->add_option("config", path, "Divisor JSON")->required();

  auto* fiber = app.add_subcommand("fiber-decompose", "Greatest pi-nef minorant on one fiber");
  fiber->add_option("config", path, "Fiber problem JSON")->required();

  int m = 0;
  int m_max = 200;
  auto* count = app.add_subcommand("count-sections", "Small-section counts and chi brackets");
  count->add_option("config", path, "Divisor JSON")->required();
  count->add_option("--m", m, "Single level m (default: sweep up to --m-max)")->check(CLI::PositiveNumber);
  count->add_option("--m-max", m_max, "Largest level of the sweep")->default_val(200)->check(CLI::PositiveNumber);

  double ea0 = 0.8, ea1 = 0.8;
  bool json_out = false;
  auto* repro = app.add_subcommand("reproduce-example", "The explicit non-nef example with a0, a1 in (0, 1)");
  repro->add_option("--a0", ea0, "a0")->default_val(0.8);
  repro->add_option("--a1", ea1, "a1")->default_val(0.8);
  repro->add_flag("--json", json_out, "Print JSON instead of the text table");

  std::uint64_t seed = 42;
  int vcount = 200;
  auto* verify = app.add_subcommand("verify", "Randomized theorem checks");
  verify->add_option("--seed", seed, "RNG seed")->default_val(42);
  verify->add_option("--count", vcount, "Number of positive-degree divisors")->default_val(200);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*analyze) return run_analyze(path, common);
    if (*volume) return run_volume(path, common);
    if (*inter) return run_intersect(path, path2, common);
    if (*zar) return run_zariski(path, common);
    if (*fiber) return run_fiber(path, common);
    if (*count) return run_count(path, m, m_max, common);
    if (*repro) return run_reproduce(ea0, ea1, json_out, common);
    if (*verify) return run_verify(seed, vcount, common);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
