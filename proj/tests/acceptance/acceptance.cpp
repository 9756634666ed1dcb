// Acceptance criteria 1-9. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "arakzar/fiber_config.hpp"
#include "arakzar/intersection.hpp"
#include "arakzar/numeric.hpp"
#include "arakzar/positivity_zariski.hpp"
#include "arakzar/random_family.hpp"
#include "arakzar/volumes.hpp"

using namespace arakzar;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

/// Collects failures from worker threads; keeps the first few messages.
class Failures {
 public:
  void add(const std::string& msg) {
    std::lock_guard<std::mutex> lock(mu_);
    ++count_;
    if (first_.size() < 3) first_.push_back(msg);
  }
  int count() const { return count_; }
  std::string summary() const {
    std::string s;
    for (const auto& m : first_) s += (s.empty() ? "" : "; ") + m;
    return s;
  }

 private:
  std::mutex mu_;
  int count_ = 0;
  std::vector<std::string> first_;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double phi(double x, double a0, double a1) {
  return -xlogx(1.0 - x) - xlogx(x) + (1.0 - x) * std::log(a0) + x * std::log(a1);
}

ToricArithDivisor logexp_divisor(double a0, double a1) { return horizontal(1.0, 0.0, GreenCurve::logexp(a0, a1)); }

// ---- 1 ---------------------------------------------------------------------

Outcome criterion_1() {
  Outcome o;
  o.budget = 1.0;
  const double a0 = 0.8, a1 = 0.8;
  const auto z = zariski(logexp_divisor(a0, a1));
  const double vt = z.theta.lo, th = z.theta.hi;
  const double r1 = std::abs(phi(vt, a0, a1)), r2 = std::abs(phi(th, a0, a1));
  if (r1 > 1e-10 || r2 > 1e-10) o.pass = false;
  if (z.gram.size() != 2) {
    o.pass = false;
    o.detail = "Gram matrix is not 2x2";
    return o;
  }
  const double n1 = ((1 - vt) * std::log(1 - vt) + (std::log(a0) + 1) * vt) / 2;
  const double n2 = (th * std::log(th) + (std::log(a1) + 1) * (1 - th)) / 2;
  const double e1 = std::abs(z.gram[0][0] - n1), e2 = std::abs(z.gram[1][1] - n2);
  const double off = std::max(std::abs(z.gram[0][1]), std::abs(z.gram[1][0]));
  double orth = 0.0;
  for (double v : z.orthogonality) orth = std::max(orth, std::abs(v));
  const bool negdef = std::all_of(z.gram_eigenvalues.begin(), z.gram_eigenvalues.end(), [](double e) { return e < -1e-9; });
  o.pass = o.pass && e1 <= 1e-6 && e2 <= 1e-6 && off <= 1e-6 && orth <= 1e-6 && negdef;
  std::ostringstream s;
  s.precision(12);
  s << "vartheta=" << vt << " theta=" << th << " |phi|<=" << std::max(r1, r2) << " N1^2=" << z.gram[0][0]
    << " N2^2=" << z.gram[1][1] << " closed-form err=" << std::max(e1, e2) << " off-diag=" << off << " P.Ni=" << orth
    << (negdef ? " negative definite" : " NOT negative definite");
  o.detail = s.str();
  return o;
}

// ---- 2, 3, 4 ----------------------------------------------------------------

struct Family {
  std::vector<RandomCase> positive;
  std::vector<RandomCase> zero;
};

const Family& family() {
  static const Family f{positive_degree_family(2024, 240), degree_zero_family(2025, 100)};
  return f;
}

Outcome criterion_2() {
  Outcome o;
  o.budget = 20.0;
  const auto& fam = family();
  Failures bad;
  parallel_for(static_cast<int>(fam.positive.size()), [&](int i) {
    const auto& D = fam.positive[static_cast<std::size_t>(i)].divisor;
    const bool eq = std::abs(intersect(D, D) - vol(D)) <= 1e-6;
    if (is_nef(D) != eq) bad.add("positive #" + std::to_string(i));
  });
  parallel_for(static_cast<int>(fam.zero.size()), [&](int i) {
    const auto& D = fam.zero[static_cast<std::size_t>(i)].divisor;
    // deg(D_K) = 0: nef iff D is an R-principal divisor plus a nonnegative constant,
    // iff pseudo-effective with deg^2 = vol.
    const auto h = hodge_check(D);
    const bool structured = h.structure && h.structure->lambda >= -1e-9;
    const bool eq = std::abs(intersect(D, D) - vol(D)) <= 1e-6;
    const bool nef = is_nef(D);
    if (nef != structured || nef != (is_pseudo_effective(D) && eq)) bad.add("degree-zero #" + std::to_string(i));
  });
  o.pass = bad.count() == 0;
  o.detail = std::to_string(fam.positive.size()) + " deg>0 and " + std::to_string(fam.zero.size()) +
             " deg=0 divisors, exceptions=" + std::to_string(bad.count()) + (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

Outcome criterion_3() {
  Outcome o;
  o.budget = 20.0;
  const auto& fam = family();
  Failures bad;
  int rel_nef = 0;
  std::mutex mu;
  parallel_for(static_cast<int>(fam.positive.size()), [&](int i) {
    const auto& D = fam.positive[static_cast<std::size_t>(i)].divisor;
    const double d2 = intersect(D, D);
    const double vc = vol_chi(D);
    const bool rn = is_relatively_nef(D);
    if (rn) {
      std::lock_guard<std::mutex> lock(mu);
      ++rel_nef;
    }
    if (d2 > vc + 1e-6) bad.add("#" + std::to_string(i) + " deg^2 > vol_chi");
    if ((std::abs(d2 - vc) <= 1e-6) != rn) bad.add("#" + std::to_string(i) + " equality mismatch");
  });
  o.pass = bad.count() == 0;
  o.detail = std::to_string(fam.positive.size()) + " divisors (" + std::to_string(rel_nef) +
             " relatively nef), exceptions=" + std::to_string(bad.count()) + (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

Outcome criterion_4() {
  Outcome o;
  o.budget = 20.0;
  const auto& fam = family();
  Failures bad;
  std::mutex mu;
  int decomps = 0, b_tests = 0;
  parallel_for(static_cast<int>(fam.positive.size()), [&](int i) {
    const auto& D = fam.positive[static_cast<std::size_t>(i)].divisor;
    if (!is_pseudo_effective(D)) return;
    const auto z = zariski(D);
    const auto N = z.N();
    const double pn = intersect(z.P, N), nn = intersect(N, N);
    const std::string tag = "#" + std::to_string(i);
    if (std::abs(pn) > 1e-6) bad.add(tag + " P.N");
    if (nn > 1e-6) bad.add(tag + " N^2 > 0");
    if ((nn < -1e-9) != !is_nef(D)) bad.add(tag + " strictness");
    int local_b = 0;
    if (!z.N_pieces.empty()) {
      Rng rng(7000 + static_cast<std::uint64_t>(i));
      for (int t = 0; t < 5; ++t) {
        std::vector<std::pair<double, ToricArithDivisor>> terms;
        double total = 0.0;
        for (const auto& piece : z.N_pieces) {
          const double w = uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.05, 1.0);
          total += w;
          terms.emplace_back(w, piece.divisor);
        }
        if (total == 0.0) terms.front().first = 0.5;
        const auto B = linear_combine(terms);
        if (!is_effective(B) || sup_difference(B.green(), N.green()) > 1e-9) bad.add(tag + " generator left [0, N]");
        if (std::abs(intersect(z.P, B)) > 1e-6) bad.add(tag + " P.B");
        if (!(intersect(B, B) < -1e-9)) bad.add(tag + " B^2");
        ++local_b;
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    ++decomps;
    b_tests += local_b;
  });
  o.pass = bad.count() == 0;
  o.detail = std::to_string(decomps) + " decompositions, " + std::to_string(b_tests) + " sub-effective B, exceptions=" +
             std::to_string(bad.count()) + (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome criterion_5() {
  Outcome o;
  o.budget = 20.0;
  std::ostringstream s;
  s.precision(4);
  struct Target {
    const char* name;
    ToricArithDivisor D;
  };
  const std::vector<Target> targets = {{"FS", logexp_divisor(1.0, 1.0)}, {"0.8", logexp_divisor(0.8, 0.8)}};
  const std::vector<int> ms = {25, 50, 100, 200};
  for (const auto& t : targets) {
    const OkounkovData ok(t.D);
    const auto [v, vc] = volumes(ok);
    s << t.name << " vol err:";
    for (int m : ms) {
      const auto c = count_sections(t.D, ok, m, CountOptions{0, {}});
      const double err = 2.0 * c.log_count_upper / (m * static_cast<double>(m)) - v;
      const double window = 0.35 * std::log(m) / m;
      if (std::abs(err) > window) o.pass = false;
      s << " m=" << m << ":" << err << (std::abs(err) <= window ? "" : "!") << "/" << window;
    }
    s << "; chi err:";
    for (int m : ms) {
      const auto b = chi_estimate(t.D, ok, m);
      const double err = 2.0 * b.upper / (m * static_cast<double>(m)) - vc;
      const double window = 0.35 * std::log(m) / m;
      if (std::abs(err) > window) o.pass = false;
      s << " m=" << m << ":" << err << (std::abs(err) <= window ? "" : "!");
    }
    s << "; ";
  }
  const auto c1 = count_sections(canonical_h0(), 1);
  const bool five = c1.exact && *c1.exact == 5;
  if (!five) o.pass = false;
  s << "(H0,t+) m=1 exact=" << (c1.exact ? std::to_string(*c1.exact) : "none");
  o.detail = s.str();
  return o;
}

// ---- 6 ---------------------------------------------------------------------

/// sup_t (x t - u(t)) by dense scan and golden-section polish, with the tail limits at the ends of Delta.
double direct_conjugate(const GreenCurve& u, double x, const Asymptotics& as) {
  const double lo = -40.0, hi = 40.0;
  const int n = 16001;
  double best = -1e300, arg = lo;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    const double v = x * t - u(t);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  const double h = (hi - lo) / (n - 1);
  double a = arg - h, b = arg + h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (x * c - u(c) > x * d - u(d)) b = d;
    else a = c;
  }
  best = std::max(best, x * 0.5 * (a + b) - u(0.5 * (a + b)));
  if (x == as.slope_minus) best = std::max(best, -as.intercept_minus);
  if (x == as.slope_plus) best = std::max(best, -as.intercept_plus);
  return best;
}

Outcome criterion_6() {
  Outcome o;
  o.budget = 20.0;
  Rng rng(606);
  std::vector<GreenCurve> us;
  for (int i = 0; i < 50; ++i) us.push_back(random_nonconvex_profile(rng));
  Failures bad;
  std::vector<double> legendre_err(us.size(), 0.0), contact_err(us.size(), 0.0);
  parallel_for(static_cast<int>(us.size()), [&](int i) {
    const auto& u = us[static_cast<std::size_t>(i)];
    const std::string tag = "#" + std::to_string(i);
    const GreenCurve q = convex_envelope(u);
    if (sup_difference(q, u) > 1e-9) bad.add(tag + " q > u");
    if (!is_convex(q)) bad.add(tag + " q not convex");
    const auto as = asymptotics(u);
    const auto Lq = legendre(q);
    double le = 0.0;
    for (double x : numeric::linspace(as.slope_minus, as.slope_plus, 11)) le = std::max(le, std::abs(Lq(x) - direct_conjugate(u, x, as)));
    legendre_err[static_cast<std::size_t>(i)] = le;
    if (le > 1e-8) bad.add(tag + " Legendre");
    const auto [lo, hi] = sampling_window(u);
    std::vector<double> ts = numeric::linspace(lo - 2.0, hi + 2.0, 20001);
    for (double k : u.kinks(lo - 2.0, hi + 2.0)) ts.push_back(k);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return b - a < 1e-12; }), ts.end());
    double s = 0.0;
    for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
      const double left = (q(ts[k]) - q(ts[k - 1])) / (ts[k] - ts[k - 1]);
      const double right = (q(ts[k + 1]) - q(ts[k])) / (ts[k + 1] - ts[k]);
      s += (u(ts[k]) - q(ts[k])) * (right - left);
    }
    contact_err[static_cast<std::size_t>(i)] = std::abs(s);
    if (std::abs(s) > 1e-6) bad.add(tag + " contact integral");
  });
  o.pass = bad.count() == 0;
  o.detail = "50 profiles, max Legendre gap " + fmt("%.2e", *std::max_element(legendre_err.begin(), legendre_err.end())) +
             ", max |int (u-q) dmu_q| " + fmt("%.2e", *std::max_element(contact_err.begin(), contact_err.end())) +
             ", exceptions=" + std::to_string(bad.count()) + (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

// ---- 7 ---------------------------------------------------------------------

Eigen::VectorXd brute_force_greatest(const FiberConfiguration& cfg, const VerticalDivisorData& d, double R, double h) {
  const int r = cfg.r();
  const int steps = static_cast<int>(std::ceil(R / h));
  Eigen::VectorXd best = Eigen::VectorXd::Constant(r, -1e300);
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  Eigen::VectorXd q(r);
  while (true) {
    for (int i = 0; i < r; ++i) q(i) = d.v(i) - idx[static_cast<std::size_t>(i)] * h;
    if ((d.e + cfg.M * q).minCoeff() >= -1e-12) best = best.cwiseMax(q);
    int k = 0;
    while (k < r && idx[static_cast<std::size_t>(k)] == steps) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == r) break;
    ++idx[static_cast<std::size_t>(k)];
  }
  return best;
}

Outcome criterion_7() {
  Outcome o;
  o.budget = 20.0;
  std::vector<std::pair<FiberConfiguration, VerticalDivisorData>> problems;
  {
    FiberConfiguration c;
    c.M = Eigen::MatrixXd(2, 2);
    c.M << -2, 2, 2, -2;
    c.mult = Eigen::VectorXd::Ones(2);
    VerticalDivisorData d{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 3)};
    problems.emplace_back(c, d);
    problems.emplace_back(c, VerticalDivisorData{Eigen::Vector2d(1, 0.5), Eigen::Vector2d(0, 3)});
    FiberConfiguration t;
    t.M = Eigen::MatrixXd(3, 3);
    t.M << -2, 1, 1, 1, -2, 1, 1, 1, -2;
    t.mult = Eigen::VectorXd::Ones(3);
    problems.emplace_back(t, VerticalDivisorData{Eigen::Vector3d(1, 1, 0), Eigen::Vector3d(-0.5, 0, 1)});
  }
  Rng rng(707);
  for (int i = 0; i < 100; ++i) {
    const int r = 1 + static_cast<int>(rng() % 6);
    auto cfg = random_fiber_configuration(rng, r);
    auto d = random_vertical_data(rng, cfg);
    problems.emplace_back(std::move(cfg), std::move(d));
  }
  Failures bad;
  std::mutex mu;
  int brute = 0;
  double worst_slack = 0.0, worst_comp = 0.0, worst_gap = 0.0;
  parallel_for(static_cast<int>(problems.size()), [&](int i) {
    const auto& [cfg, d] = problems[static_cast<std::size_t>(i)];
    const std::string tag = "#" + std::to_string(i);
    if (!validate(cfg).ok) {
      bad.add(tag + " invalid configuration");
      return;
    }
    const auto res = greatest_pi_nef(cfg, d);
    const double slack = res.slack.minCoeff();
    const double comp = std::abs(res.n.dot(res.slack));
    const double ratio = (res.n.array() / cfg.mult.array()).minCoeff();
    if (slack < -1e-12) bad.add(tag + " slack");
    if (comp > 1e-12) bad.add(tag + " complementarity " + fmt("%.2e", comp));
    if (ratio > 1e-12) bad.add(tag + " min n/mult");
    double gap = 0.0;
    bool did_brute = false;
    if (cfg.r() <= 3) {
      const double R = res.n.maxCoeff() + 0.1;
      if (std::pow(R / 1e-2, cfg.r()) <= 8e6) {
        const Eigen::VectorXd top = brute_force_greatest(cfg, d, R, 1e-2);
        if ((top - res.q).maxCoeff() > 1e-12) bad.add(tag + " brute force exceeds q");
        gap = (res.q - top).cwiseAbs().maxCoeff();
        if (gap > 2e-2) bad.add(tag + " brute-force gap " + fmt("%.3f", gap));
        did_brute = true;
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    worst_slack = std::min(worst_slack, slack);
    worst_comp = std::max(worst_comp, comp);
    worst_gap = std::max(worst_gap, gap);
    brute += did_brute;
  });
  o.pass = bad.count() == 0;
  o.detail = std::to_string(problems.size()) + " configurations (" + std::to_string(brute) + " brute-forced), min slack " +
             fmt("%.1e", worst_slack) + ", max |n.s| " + fmt("%.1e", worst_comp) + ", max brute-force gap " +
             fmt("%.3f", worst_gap) + ", exceptions=" + std::to_string(bad.count()) + (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

// ---- 8 ---------------------------------------------------------------------

Outcome criterion_8() {
  Outcome o;
  o.budget = 20.0;
  const auto fam = degree_zero_family(808, 100);
  Failures bad;
  std::mutex mu;
  int equality = 0;
  double worst = -1e300, worst_res = 0.0;
  parallel_for(static_cast<int>(fam.size()), [&](int i) {
    const auto& rc = fam[static_cast<std::size_t>(i)];
    const auto h = hodge_check(rc.divisor);
    const std::string tag = "#" + std::to_string(i);
    if (h.self_deg > 1e-9) bad.add(tag + " deg^2 > 0");
    if (rc.category == "degree_zero_flat" && !h.structure) bad.add(tag + " flat case not reconstructed");
    double res = 0.0;
    if (h.structure) {
      res = h.structure->residual;
      if (res > 1e-8) bad.add(tag + " residual");
    }
    std::lock_guard<std::mutex> lock(mu);
    worst = std::max(worst, h.self_deg);
    worst_res = std::max(worst_res, res);
    equality += h.structure.has_value();
  });
  o.pass = bad.count() == 0;
  o.detail = "100 divisors, max deg^2 " + fmt("%.2e", worst) + ", " + std::to_string(equality) +
             " equality cases, max residual " + fmt("%.1e", worst_res) + ", exceptions=" + std::to_string(bad.count()) +
             (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

// ---- 9 ---------------------------------------------------------------------

Outcome criterion_9() {
  Outcome o;
  o.budget = 20.0;
  const auto& fam = family();
  Failures bad;
  std::mutex mu;
  int count_pairs = 0, b1_samples = 0;
  parallel_for(static_cast<int>(fam.positive.size()), [&](int i) {
    const auto& D = fam.positive[static_cast<std::size_t>(i)].divisor;
    const std::string tag = "#" + std::to_string(i);
    const double v = vol(D);
    for (double eps : {0.1, 0.5, 1.0}) {
      const double ve = vol(D + constant_divisor(eps));
      if (v > ve + 1e-9 || ve > v + eps * D.degree() + 1e-9) bad.add(tag + " sandwich eps=" + fmt("%g", eps));
    }
    if (is_pseudo_effective(D) != is_pseudo_effective(relative_zariski(D).Q)) bad.add(tag + " psef of D vs Q");
    if (!is_pseudo_effective(D)) return;
    const auto P = zariski(D).P;
    const OkounkovData ok(D);
    Rng rng(9000 + static_cast<std::uint64_t>(i));
    int local_b1 = 0, local_pairs = 0;
    for (int t = 0; t < 8; ++t) {
      const double k = uniform(rng, ok.delta().lo, ok.delta().hi);
      const double s = uniform(rng, -0.3, 0.3) + 2.0 * ok.G(k);
      const RealPrincipal phi{-k, {{2, s / (2.0 * std::log(2.0))}}};
      if (is_effective(D + principal(phi)) != is_effective(P + principal(phi))) bad.add(tag + " effectivity of D+phi vs P+phi");
      ++local_b1;
    }
    // Section counts of D and P, only for the first big divisors to stay within budget.
    if (i < 48 && is_big(D)) {
      for (int m = 1; m <= 20; ++m) {
        const auto cd = count_sections(D, m, CountOptions{2000, {}});
        const auto cp = count_sections(P, m, CountOptions{2000, {}});
        if (std::abs(cd.log_count_upper - cp.log_count_upper) > 1e-9) bad.add(tag + " box bound m=" + std::to_string(m));
        if (cd.exact && cp.exact) {
          ++local_pairs;
          if (*cd.exact != *cp.exact) bad.add(tag + " count m=" + std::to_string(m));
        }
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    b1_samples += local_b1;
    count_pairs += local_pairs;
  });
  o.pass = bad.count() == 0;
  o.detail = std::to_string(fam.positive.size()) + " divisors x 3 eps, " + std::to_string(b1_samples) +
             " principal samples, " + std::to_string(count_pairs) + " exact count pairs (m<=20), exceptions=" +
             std::to_string(bad.count()) + (bad.count() ? " (" + bad.summary() + ")" : "");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                          criterion_6, criterion_7, criterion_8, criterion_9};
  int failed = 0;
  family();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    o.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (o.budget > 0.0 && o.seconds > o.budget) {
      o.pass = false;
      o.detail += " [over time budget " + fmt("%.0f s", o.budget) + "]";
    }
    failed += !o.pass;
    std::printf("criterion %zu: %s  (%.2f s)  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
