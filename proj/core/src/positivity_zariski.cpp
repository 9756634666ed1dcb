#include "arakzar/positivity_zariski.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "arakzar/errors.hpp"
#include "arakzar/numeric.hpp"

namespace arakzar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPsefTol = 1e-12;

}  // namespace

bool is_integrable(const ToricArithDivisor& d) { return integrable_profile(d.green()); }

bool is_relatively_nef(const ToricArithDivisor& d, const CurveOptions& opts) {
  return d.degree() >= -opts.tol && is_convex(d.green(), opts);
}

bool is_pseudo_effective(const ToricArithDivisor& d, const OkounkovData& ok) {
  (void)d;
  return !ok.delta().empty && ok.g_max() >= -kPsefTol;
}

bool is_pseudo_effective(const ToricArithDivisor& d, const CurveOptions& opts) {
  if (d.degree() < -1e-12) return false;
  return is_pseudo_effective(d, OkounkovData(d, opts));
}

bool is_nef(const ToricArithDivisor& d, const OkounkovData& ok, const CurveOptions& opts) {
  if (ok.delta().empty || !is_relatively_nef(d, opts)) return false;
  const double g_end = std::min(ok.G(ok.delta().lo), ok.G(ok.delta().hi));
  const bool nef = g_end >= -opts.tol;
  if (nef) {
    const double guard = -std::max(10.0 * opts.tol, 1e-8);
    const RationalPoint points[] = {RationalPoint::of(0),     RationalPoint::at_infinity(), RationalPoint::of(1),
                                    RationalPoint::of(-1),    RationalPoint::of(2),         RationalPoint::of(-2),
                                    RationalPoint::of(1, 2),  RationalPoint::of(-1, 2)};
    for (const auto& z : points) {
      const double h = height(d, z);
      if (h < guard) {
        std::ostringstream msg;
        msg << "toric nef criterion contradicted: G >= 0 on the Okounkov interval but height at "
            << (z.infinite ? std::string("inf") : std::to_string(z.num) + "/" + std::to_string(z.den)) << " is " << h;
        throw PropertyViolation(msg.str());
      }
    }
  }
  return nef;
}

bool is_nef(const ToricArithDivisor& d, const CurveOptions& opts) {
  if (d.degree() < -opts.tol) return false;
  return is_nef(d, OkounkovData(d, opts), opts);
}

bool is_big(const ToricArithDivisor& d, const CurveOptions& opts) { return vol(d, opts) > 0.0; }

RelativeZariski relative_zariski(const ToricArithDivisor& d, const CurveOptions& opts) {
  if (d.degree() < -opts.tol) throw InputError("relative Zariski decomposition requires deg(D_K) >= 0");
  const GreenCurve q = convex_envelope(d.green(), opts);
  RelativeZariski out{ToricArithDivisor(d.a0(), d.a1(), d.fibers(), q),
                      ToricArithDivisor(0.0, 0.0, {}, combine_curves({{1.0, d.green()}, {-1.0, q}}))};
  return out;
}

ToricArithDivisor ZariskiReport::N() const {
  std::vector<std::pair<double, ToricArithDivisor>> terms;
  for (const auto& piece : N_pieces) terms.emplace_back(1.0, piece.divisor);
  if (terms.empty()) return ToricArithDivisor();
  return linear_combine(terms);
}

std::vector<double> symmetric_eigenvalues(const std::vector<std::vector<double>>& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (n == 0) return {};
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = 0.5 * (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                       m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

namespace {

struct Basics {
  OkounkovData ok;
  double deg_self;
  double vol;
  double vol_chi;
  bool nef;
  bool relatively_nef;
  bool pseudo_effective;
};

Basics basics(const ToricArithDivisor& d, const PositivityOptions& opts) {
  if (!is_integrable(d)) throw InputError("pairing undefined for non-integrable divisor");
  OkounkovData ok(d, opts.curve);
  const auto [v, vc] = volumes(ok);
  const double self = intersect(d, d, opts.pairing);
  const bool rel = is_relatively_nef(d, opts.curve);
  const bool nef = rel && is_nef(d, ok, opts.curve);
  const bool psef = is_pseudo_effective(d, ok);
  return {std::move(ok), self, v, vc, nef, rel, psef};
}

// n(t) = q(t) - (x t - u*(x)) on the side of the contact point facing away
// from the window, zero elsewhere.
GreenCurve tangent_gap(const GreenCurve& q, double x, double ustar, double t_contact, bool left) {
  const GreenCurve gap = combine_curves({{1.0, q}, {1.0, GreenCurve::affine(-x, ustar)}});
  const GreenCurve zero = GreenCurve::affine(0.0, 0.0);
  if (left) return GreenCurve::piecewise({t_contact}, {gap, zero}).assume_convex();
  return GreenCurve::piecewise({t_contact}, {zero, gap}).assume_convex();
}

ZariskiReport zariski_from(const ToricArithDivisor& d, const Basics& b, const PositivityOptions& opts) {
  if (!b.pseudo_effective) throw InputError("Zariski decomposition requires a pseudo-effective divisor");
  const OkounkovData& ok = b.ok;
  const LegendreTransform& conj = *ok.conjugate();
  const GreenCurve& q = conj.curve();
  const double x_lo = std::clamp(ok.theta().lo, conj.lo(), conj.hi());
  const double x_hi = std::clamp(ok.theta().hi, x_lo, conj.hi());

  ZariskiReport r;
  r.theta = ok.theta();
  r.deg_self_D = b.deg_self;
  r.vol_D = b.vol;
  r.vol_chi_D = b.vol_chi;

  const GreenCurve p = restricted_conjugate(q, x_lo, x_hi);
  r.P = ToricArithDivisor(x_hi, -x_lo, d.fibers(), p);

  const bool left_open = x_lo <= conj.lo();
  const bool right_open = x_hi >= conj.hi();
  r.t_minus = left_open ? -kInf : conj.contact_point(x_lo);
  r.t_plus = right_open ? kInf : conj.contact_point(x_hi);
  if (!left_open && !right_open && r.t_plus < r.t_minus) r.t_plus = r.t_minus;

  const double c1 = d.a1() + x_lo;
  const double c0 = d.a0() - x_hi;
  if (!left_open && c1 > 0.0) {
    const GreenCurve n1 = tangent_gap(q, x_lo, conj(x_lo), r.t_minus, true);
    r.N_pieces.push_back({"H1", ToricArithDivisor(0.0, c1, {}, n1), true});
  }
  if (!right_open && c0 > 0.0) {
    const GreenCurve n2 = tangent_gap(q, x_hi, conj(x_hi), r.t_plus, false);
    r.N_pieces.push_back({"H0", ToricArithDivisor(c0, 0.0, {}, n2), true});
  }
  if (!q.same_node(d.green()) && sup_difference(d.green(), q, opts.curve) > opts.curve.tol) {
    const GreenCurve f = combine_curves({{1.0, d.green()}, {-1.0, q}});
    r.N_pieces.push_back({"function", ToricArithDivisor(0.0, 0.0, {}, f), false});
  }

  for (const auto& piece : r.N_pieces) {
    r.orthogonality.push_back(intersect(r.P, piece.divisor, opts.pairing));
    if (piece.positive_current) r.gram_labels.push_back(piece.label);
  }
  std::vector<const ToricArithDivisor*> pos;
  for (const auto& piece : r.N_pieces)
    if (piece.positive_current) pos.push_back(&piece.divisor);
  r.gram.assign(pos.size(), std::vector<double>(pos.size(), 0.0));
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i; j < pos.size(); ++j) r.gram[i][j] = r.gram[j][i] = intersect(*pos[i], *pos[j], opts.pairing);
  r.gram_eigenvalues = symmetric_eigenvalues(r.gram);

  const ToricArithDivisor n_total = d - r.P;
  r.p_dot_n = intersect(r.P, n_total, opts.pairing);
  r.n_self = intersect(n_total, n_total, opts.pairing);
  r.vol_P = vol(r.P, opts.curve);

  const double tol = opts.equality_tol;
  auto& f = r.flags;
  f.nef_D = b.nef;
  f.pseudo_effective_D = b.pseudo_effective;
  f.big_D = b.vol > 0.0;
  f.relatively_nef_D = b.relatively_nef;
  const bool deg_eq_vol = std::abs(b.deg_self - b.vol) <= tol;
  const bool deg_eq_chi = std::abs(b.deg_self - b.vol_chi) <= tol;
  f.consistent_thm_4_3 = d.degree() <= 0.0 || deg_eq_vol == b.nef;
  f.consistent_cor_4_4 = b.nef == (b.pseudo_effective && deg_eq_vol);
  f.consistent_thm_2_1 = b.deg_self <= b.vol_chi + tol && deg_eq_chi == b.relatively_nef;
  f.consistent_thm_5_1 = ((r.n_self < -opts.strict_margin) == !b.nef) && std::abs(r.p_dot_n) <= tol &&
                         r.n_self <= tol && std::abs(r.vol_P - r.vol_D) <= tol;
  return r;
}

}  // namespace

ZariskiReport zariski(const ToricArithDivisor& d, const PositivityOptions& opts) {
  return zariski_from(d, basics(d, opts), opts);
}

GramResult gram_of(const ZariskiReport& report, const PositivityOptions& opts) {
  GramResult g;
  g.labels = report.gram_labels;
  g.matrix = report.gram;
  g.eigenvalues = report.gram_eigenvalues;
  for (std::size_t i = 0; i < report.N_pieces.size(); ++i) {
    if (!report.N_pieces[i].positive_current) continue;
    if (std::abs(report.orthogonality[i]) > opts.equality_tol) {
      std::ostringstream msg;
      msg << "deg(P . N_" << report.N_pieces[i].label << ") = " << report.orthogonality[i] << " is not 0";
      throw PropertyViolation(msg.str());
    }
  }
  for (double e : g.eigenvalues) {
    if (e > opts.strict_margin) {
      std::ostringstream msg;
      msg << "negative part Gram matrix has eigenvalue " << e << " > 0";
      throw PropertyViolation(msg.str());
    }
    g.negative_definite = g.negative_definite && e < -opts.strict_margin;
  }
  return g;
}

GramResult gram_negative_part(const ToricArithDivisor& d, const PositivityOptions& opts) {
  return gram_of(zariski(d, opts), opts);
}

namespace {

// prod_p p^{-floor(n c_p)} as num/den, or nullopt on overflow.
std::optional<PrincipalMonomial> smallest_coefficient(const FiberMap& fibers, int n) {
  long long num = 1;
  long long den = 1;
  for (const auto& [p, c] : fibers) {
    const long long f = numeric::robust_floor(n * c);
    long long& target = f < 0 ? num : den;
    for (long long i = 0; i < std::llabs(f); ++i)
      if (__builtin_mul_overflow(target, p, &target)) return std::nullopt;
  }
  return PrincipalMonomial{0, num, den};
}

}  // namespace

AutissierSection autissier_section(const ToricArithDivisor& d, double eps, int n_max, const PositivityOptions& opts) {
  if (!is_integrable(d)) throw InputError("autissier_section requires an integrable divisor");
  if (!(d.degree() > 0.0)) throw InputError("autissier_section requires deg(D_K) > 0");
  if (!(eps > 0.0)) throw InputError("autissier_section requires eps > 0");
  const double self = intersect(d, d, opts.pairing);
  const OkounkovData ok(d, opts.curve);
  const LegendreTransform& conj = *ok.conjugate();
  const double rate = self / (2.0 * d.degree());
  for (int n = 1; n <= n_max; ++n) {
    const auto coeff = smallest_coefficient(d.fibers(), n);
    if (!coeff) break;
    const double log_q = std::log(static_cast<double>(coeff->num)) - std::log(static_cast<double>(coeff->den));
    const double log_bound = -n * rate + n * eps;
    const long long kmin = numeric::robust_ceil(-static_cast<double>(n) * d.a1());
    const long long kmax = numeric::robust_floor(static_cast<double>(n) * d.a0());
    double best = kInf;
    long long best_k = 0;
    for (long long k = kmin; k <= kmax; ++k) {
      const double x = std::clamp(static_cast<double>(k) / n, conj.lo(), conj.hi());
      const double lg = log_q + 0.5 * n * conj(x);
      if (lg < best) {
        best = lg;
        best_k = k;
      }
    }
    if (best <= log_bound) {
      AutissierSection s;
      s.n = n;
      s.monomial = *coeff;
      s.monomial.k = best_k;
      s.norm = std::exp(best);
      s.bound = std::exp(log_bound);
      return s;
    }
  }
  throw NumericError("no small section found up to n_max; increase n_max");
}

TheoremCheck verify_main_theorem(const ToricArithDivisor& d, const PositivityOptions& opts) {
  TheoremCheck c;
  const Basics b = basics(d, opts);
  c.deg_self = b.deg_self;
  c.vol = b.vol;
  c.vol_chi = b.vol_chi;
  c.nef = b.nef;
  c.relatively_nef = b.relatively_nef;
  c.pseudo_effective = b.pseudo_effective;
  c.big = b.vol > 0.0;
  const double tol = opts.equality_tol;
  const bool deg_eq_vol = std::abs(b.deg_self - b.vol) <= tol;
  const bool deg_eq_chi = std::abs(b.deg_self - b.vol_chi) <= tol;
  c.thm_4_3 = d.degree() <= 0.0 || deg_eq_vol == b.nef;
  c.cor_4_4 = b.nef == (b.pseudo_effective && deg_eq_vol);
  c.thm_2_1 = b.ok.delta().empty || (b.deg_self <= b.vol_chi + tol && deg_eq_chi == b.relatively_nef);
  c.thm_5_1 = true;
  if (b.pseudo_effective) {
    const ZariskiReport r = zariski_from(d, b, opts);
    c.n_self = r.n_self;
    c.p_dot_n = r.p_dot_n;
    c.thm_5_1 = r.flags.consistent_thm_5_1;
  }
  return c;
}

}  // namespace arakzar
