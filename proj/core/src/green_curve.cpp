#include "arakzar/green_curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "arakzar/errors.hpp"
#include "arakzar/numeric.hpp"

namespace arakzar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;
// Hard bound on |t| for searches and sampling. exp(-800) underflows, so nothing
// representable changes beyond it.
constexpr double kMaxT = 800.0;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InputError(std::string("non-finite ") + what);
}

}  // namespace

struct GreenCurve::Node {
  Kind kind = Kind::affine;
  double p0 = 0.0;
  double p1 = 0.0;
  std::vector<GreenCurve> args;
  std::vector<double> ts;
  std::vector<double> us;
  Asymptotics asym;
  bool convex = false;
  bool grid_inside = false;
};

GreenCurve::GreenCurve() : GreenCurve(affine(0.0, 0.0)) {}

GreenCurve GreenCurve::affine(double slope, double intercept) {
  require_finite(slope, "affine slope");
  require_finite(intercept, "affine intercept");
  auto n = std::make_shared<Node>();
  n->kind = Kind::affine;
  n->p0 = slope;
  n->p1 = intercept;
  n->asym = {slope, intercept, slope, intercept};
  n->convex = true;
  return GreenCurve(std::move(n));
}

GreenCurve GreenCurve::logexp(double a, double b) {
  require_finite(a, "logexp a");
  require_finite(b, "logexp b");
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("logexp requires a > 0 and b > 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::logexp;
  n->p0 = a;
  n->p1 = b;
  n->asym = {0.0, std::log(a), 1.0, std::log(b)};
  n->convex = true;
  return GreenCurve(std::move(n));
}

namespace {

// Lexicographic dominance of asymptotic lines. For max at +inf the larger slope
// wins; at -inf the smaller slope wins. Ties go to the larger (max) or smaller
// (min) intercept.
std::size_t dominant(const std::vector<GreenCurve>& args, bool is_max, bool plus_side) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const auto& a = args[i].asymptotics();
    const auto& b = args[best].asymptotics();
    const double sa = plus_side ? a.slope_plus : a.slope_minus;
    const double sb = plus_side ? b.slope_plus : b.slope_minus;
    const double ca = plus_side ? a.intercept_plus : a.intercept_minus;
    const double cb = plus_side ? b.intercept_plus : b.intercept_minus;
    // max at +inf and min at -inf prefer larger slopes.
    const bool prefer_larger_slope = (is_max == plus_side);
    if (sa != sb) {
      if ((sa > sb) == prefer_larger_slope) best = i;
    } else if ((ca > cb) == is_max && ca != cb) {
      best = i;
    }
  }
  return best;
}

}  // namespace

GreenCurve GreenCurve::max(std::vector<GreenCurve> args) { return extremum(std::move(args), true); }
GreenCurve GreenCurve::min(std::vector<GreenCurve> args) { return extremum(std::move(args), false); }

GreenCurve GreenCurve::sum(std::vector<GreenCurve> args) {
  if (args.empty()) throw InputError("sum needs at least one argument");
  if (args.size() == 1) return args.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::sum;
  n->convex = true;
  for (const auto& a : args) {
    const auto& s = a.asymptotics();
    n->asym.slope_minus += s.slope_minus;
    n->asym.intercept_minus += s.intercept_minus;
    n->asym.slope_plus += s.slope_plus;
    n->asym.intercept_plus += s.intercept_plus;
    n->convex = n->convex && a.known_convex();
    n->grid_inside = n->grid_inside || a.has_grid();
  }
  n->args = std::move(args);
  return GreenCurve(std::move(n));
}

GreenCurve GreenCurve::scale(double k, GreenCurve arg) {
  require_finite(k, "scale factor");
  if (k == 1.0) return arg;
  auto n = std::make_shared<Node>();
  n->kind = Kind::scale;
  n->p0 = k;
  const auto& s = arg.asymptotics();
  n->asym = {k * s.slope_minus, k * s.intercept_minus, k * s.slope_plus, k * s.intercept_plus};
  n->convex = k >= 0.0 && arg.known_convex();
  n->grid_inside = arg.has_grid();
  n->args = {std::move(arg)};
  return GreenCurve(std::move(n));
}

GreenCurve GreenCurve::grid(std::vector<double> ts, std::vector<double> us, Asymptotics declared) {
  if (ts.size() != us.size() || ts.size() < 2)
    throw InputError("grid needs matching ts/us arrays with at least two samples");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    require_finite(ts[i], "grid t");
    require_finite(us[i], "grid u");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw InputError("grid ts must be strictly increasing");
  }
  require_finite(declared.slope_minus, "grid asymptote");
  require_finite(declared.slope_plus, "grid asymptote");
  // Continuity forces the intercepts seen from the boundary samples.
  const double beta_minus = us.front() - declared.slope_minus * ts.front();
  const double beta_plus = us.back() - declared.slope_plus * ts.back();
  auto mismatch = [](double a, double b) { return std::abs(a - b) > 1e-6 * std::max(1.0, std::abs(b)); };
  if (mismatch(beta_minus, declared.intercept_minus) || mismatch(beta_plus, declared.intercept_plus)) {
    std::ostringstream msg;
    msg << "grid tail contradicts declared asymptotics: boundary intercepts (" << beta_minus << ", "
        << beta_plus << ") vs declared (" << declared.intercept_minus << ", " << declared.intercept_plus
        << ")";
    throw InputError(msg.str());
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::grid;
  n->asym = {declared.slope_minus, beta_minus, declared.slope_plus, beta_plus};
  n->ts = std::move(ts);
  n->us = std::move(us);
  n->grid_inside = true;
  return GreenCurve(std::move(n));
}

GreenCurve GreenCurve::piecewise(std::vector<double> breaks, std::vector<GreenCurve> pieces) {
  if (pieces.size() != breaks.size() + 1) throw InputError("piecewise needs one more piece than breaks");
  if (breaks.empty()) return pieces.front();
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    require_finite(breaks[i], "piecewise break");
    if (i > 0 && !(breaks[i] > breaks[i - 1])) throw InputError("piecewise breaks must be strictly increasing");
    const double left = pieces[i](breaks[i]);
    const double right = pieces[i + 1](breaks[i]);
    if (std::abs(left - right) > 1e-8 * std::max(1.0, std::abs(left))) {
      std::ostringstream msg;
      msg << "piecewise curve is discontinuous at t = " << breaks[i] << " (" << left << " vs " << right << ")";
      throw InputError(msg.str());
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::piecewise;
  const auto& l = pieces.front().asymptotics();
  const auto& r = pieces.back().asymptotics();
  n->asym = {l.slope_minus, l.intercept_minus, r.slope_plus, r.intercept_plus};
  for (const auto& p : pieces) n->grid_inside = n->grid_inside || p.has_grid();
  n->ts = std::move(breaks);
  n->args = std::move(pieces);
  return GreenCurve(std::move(n));
}

GreenCurve GreenCurve::positive_part() { return max({affine(0.0, 0.0), affine(1.0, 0.0)}); }
GreenCurve GreenCurve::negative_part() { return max({affine(0.0, 0.0), affine(-1.0, 0.0)}); }

GreenCurve GreenCurve::assume_convex() const {
  if (node_->convex) return *this;
  auto n = std::make_shared<Node>(*node_);
  n->convex = true;
  return GreenCurve(std::move(n));
}

GreenCurve GreenCurve::extremum(std::vector<GreenCurve> args, bool is_max) {
  if (args.empty()) throw InputError(is_max ? "max needs at least one argument" : "min needs at least one argument");
  if (args.size() == 1) return args.front();
  auto n = std::make_shared<Node>();
  n->kind = is_max ? Kind::max : Kind::min;
  const auto& lo = args[dominant(args, is_max, false)].asymptotics();
  const auto& hi = args[dominant(args, is_max, true)].asymptotics();
  n->asym = {lo.slope_minus, lo.intercept_minus, hi.slope_plus, hi.intercept_plus};
  n->convex = is_max;
  for (const auto& a : args) {
    if (is_max) n->convex = n->convex && a.known_convex();
    n->grid_inside = n->grid_inside || a.has_grid();
  }
  n->args = std::move(args);
  return GreenCurve(std::move(n));
}

const Asymptotics& GreenCurve::asymptotics() const { return node_->asym; }
GreenCurve::Kind GreenCurve::kind() const { return node_->kind; }
bool GreenCurve::known_convex() const { return node_->convex; }
bool GreenCurve::has_grid() const { return node_->grid_inside; }
double GreenCurve::param0() const { return node_->p0; }
double GreenCurve::param1() const { return node_->p1; }
const std::vector<GreenCurve>& GreenCurve::children() const { return node_->args; }
const std::vector<double>& GreenCurve::knots() const { return node_->ts; }
const std::vector<double>& GreenCurve::samples() const { return node_->us; }

namespace {

double logexp_value(double a, double b, double t) {
  if (t <= 0.0) return std::log(a) + std::log1p((b / a) * std::exp(t));
  return t + std::log(b) + std::log1p((a / b) * std::exp(-t));
}

double logexp_slope(double a, double b, double t) {
  if (t <= 0.0) {
    const double e = b * std::exp(t);
    return e / (a + e);
  }
  return b / (a * std::exp(-t) + b);
}

// Index of the grid segment [ts[i], ts[i+1]] used for a right (or left) derivative.
std::ptrdiff_t grid_segment(const std::vector<double>& ts, double t, bool right) {
  auto it = right ? std::upper_bound(ts.begin(), ts.end(), t) : std::lower_bound(ts.begin(), ts.end(), t);
  return (it - ts.begin()) - 1;
}

}  // namespace

double GreenCurve::value(double t) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::affine:
      return n.p0 * t + n.p1;
    case Kind::logexp:
      return logexp_value(n.p0, n.p1, t);
    case Kind::max: {
      double v = -kInf;
      for (const auto& a : n.args) v = std::max(v, a.value(t));
      return v;
    }
    case Kind::min: {
      double v = kInf;
      for (const auto& a : n.args) v = std::min(v, a.value(t));
      return v;
    }
    case Kind::sum: {
      double v = 0.0;
      for (const auto& a : n.args) v += a.value(t);
      return v;
    }
    case Kind::scale:
      return n.p0 * n.args.front().value(t);
    case Kind::grid: {
      const auto& ts = n.ts;
      const auto& us = n.us;
      if (t <= ts.front()) return us.front() + n.asym.slope_minus * (t - ts.front());
      if (t >= ts.back()) return us.back() + n.asym.slope_plus * (t - ts.back());
      const auto i = static_cast<std::size_t>(grid_segment(ts, t, true));
      const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
      return us[i] + w * (us[i + 1] - us[i]);
    }
    case Kind::piecewise: {
      const auto idx = std::upper_bound(n.ts.begin(), n.ts.end(), t) - n.ts.begin();
      return n.args[static_cast<std::size_t>(idx)].value(t);
    }
  }
  return 0.0;
}

static double one_sided_slope(const GreenCurve& c, double t, bool right);

double GreenCurve::slope_right(double t) const { return one_sided_slope(*this, t, true); }
double GreenCurve::slope_left(double t) const { return one_sided_slope(*this, t, false); }

static double one_sided_slope(const GreenCurve& c, double t, bool right) {
  const auto& as = c.asymptotics();
  switch (c.kind()) {
    case GreenCurve::Kind::affine:
      return c.param0();
    case GreenCurve::Kind::logexp:
      return logexp_slope(c.param0(), c.param1(), t);
    case GreenCurve::Kind::max:
    case GreenCurve::Kind::min: {
      const bool is_max = c.kind() == GreenCurve::Kind::max;
      const auto& args = c.children();
      std::vector<double> vals(args.size());
      double best = is_max ? -kInf : kInf;
      for (std::size_t i = 0; i < args.size(); ++i) {
        vals[i] = args[i].value(t);
        best = is_max ? std::max(best, vals[i]) : std::min(best, vals[i]);
      }
      const double tie = kTieTol * (1.0 + std::abs(best));
      // Right slope of a max is the largest tied right slope; left slope the smallest.
      const bool take_larger = (is_max == right);
      double slope = take_larger ? -kInf : kInf;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (std::abs(vals[i] - best) > tie) continue;
        const double s = one_sided_slope(args[i], t, right);
        slope = take_larger ? std::max(slope, s) : std::min(slope, s);
      }
      return slope;
    }
    case GreenCurve::Kind::sum: {
      double s = 0.0;
      for (const auto& a : c.children()) s += one_sided_slope(a, t, right);
      return s;
    }
    case GreenCurve::Kind::scale: {
      const double k = c.param0();
      return k * one_sided_slope(c.children().front(), t, k >= 0.0 ? right : !right);
    }
    case GreenCurve::Kind::grid: {
      const auto& ts = c.knots();
      const auto& us = c.samples();
      if (right ? t < ts.front() : t <= ts.front()) return as.slope_minus;
      if (right ? t >= ts.back() : t > ts.back()) return as.slope_plus;
      const auto i = static_cast<std::size_t>(grid_segment(ts, t, right));
      return (us[i + 1] - us[i]) / (ts[i + 1] - ts[i]);
    }
    case GreenCurve::Kind::piecewise: {
      const auto& br = c.knots();
      const auto idx = right ? std::upper_bound(br.begin(), br.end(), t) - br.begin()
                             : std::lower_bound(br.begin(), br.end(), t) - br.begin();
      return one_sided_slope(c.children()[static_cast<std::size_t>(idx)], t, right);
    }
  }
  return 0.0;
}

std::pair<double, double> GreenCurve::tail_window(double tol) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::affine:
      return {kInf, -kInf};
    case Kind::logexp: {
      // |u - line| <= ratio * e^{-|t|}; the slope deviation obeys the same bound.
      const double a = n.p0;
      const double b = n.p1;
      return {std::log(tol * a / b), std::log(a / (b * tol))};
    }
    case Kind::sum: {
      const double child_tol = tol / static_cast<double>(n.args.size());
      double lo = kInf;
      double hi = -kInf;
      for (const auto& a : n.args) {
        auto [l, h] = a.tail_window(child_tol);
        lo = std::min(lo, l);
        hi = std::max(hi, h);
      }
      return {lo, hi};
    }
    case Kind::scale: {
      const double k = std::abs(n.p0);
      if (k == 0.0) return {kInf, -kInf};
      return n.args.front().tail_window(tol / k);
    }
    case Kind::grid:
      return {n.ts.front(), n.ts.back()};
    case Kind::piecewise: {
      const double lo = std::min(n.ts.front(), n.args.front().tail_window(tol).first);
      const double hi = std::max(n.ts.back(), n.args.back().tail_window(tol).second);
      return {lo, hi};
    }
    case Kind::max:
    case Kind::min: {
      const bool is_max = n.kind == Kind::max;
      double lo = kInf;
      double hi = -kInf;
      for (const auto& a : n.args) {
        auto [l, h] = a.tail_window(0.5 * tol);
        lo = std::min(lo, l);
        hi = std::max(hi, h);
      }
      // Beyond the children's windows every argument hugs its own line; the
      // dominant line must then clear the others by 2 tol.
      const auto d_plus = dominant(n.args, is_max, true);
      const auto d_minus = dominant(n.args, is_max, false);
      const auto& dp = n.args[d_plus].asymptotics();
      const auto& dm = n.args[d_minus].asymptotics();
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        const auto& ai = n.args[i].asymptotics();
        if (i != d_plus && ai.slope_plus != dp.slope_plus) {
          const double gap = std::abs(dp.slope_plus - ai.slope_plus);
          const double diff = is_max ? ai.intercept_plus - dp.intercept_plus : dp.intercept_plus - ai.intercept_plus;
          hi = std::max(hi, (diff + 2.0 * tol) / gap);
        }
        if (i != d_minus && ai.slope_minus != dm.slope_minus) {
          const double gap = std::abs(dm.slope_minus - ai.slope_minus);
          const double diff = is_max ? ai.intercept_minus - dm.intercept_minus : dm.intercept_minus - ai.intercept_minus;
          lo = std::min(lo, -(diff + 2.0 * tol) / gap);
        }
      }
      return {lo, hi};
    }
  }
  return {kInf, -kInf};
}

std::vector<double> GreenCurve::kinks(double lo, double hi) const {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  const Node& n = *node_;
  auto append = [&out](const std::vector<double>& more) { out.insert(out.end(), more.begin(), more.end()); };
  switch (n.kind) {
    case Kind::affine:
    case Kind::logexp:
      break;
    case Kind::sum:
    case Kind::scale:
      for (const auto& a : n.args) append(a.kinks(lo, hi));
      break;
    case Kind::grid:
      for (double t : n.ts)
        if (t >= lo && t <= hi) out.push_back(t);
      break;
    case Kind::piecewise:
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        const double a = i == 0 ? lo : std::max(lo, n.ts[i - 1]);
        const double b = i == n.ts.size() ? hi : std::min(hi, n.ts[i]);
        append(n.args[i].kinks(a, b));
        if (i < n.ts.size() && n.ts[i] >= lo && n.ts[i] <= hi) out.push_back(n.ts[i]);
      }
      break;
    case Kind::max:
    case Kind::min: {
      const bool is_max = n.kind == Kind::max;
      for (const auto& a : n.args) append(a.kinks(lo, hi));
      auto [wlo, whi] = tail_window(1e-13);
      const double a = std::max(lo, std::isfinite(wlo) ? wlo - 1.0 : lo);
      const double b = std::min(hi, std::isfinite(whi) ? whi + 1.0 : hi);
      if (!(b > a)) break;
      auto active = [&](double t) {
        std::size_t best = 0;
        double bv = n.args[0].value(t);
        for (std::size_t i = 1; i < n.args.size(); ++i) {
          const double v = n.args[i].value(t);
          if (is_max ? v > bv : v < bv) {
            bv = v;
            best = i;
          }
        }
        return best;
      };
      const auto ts = numeric::linspace(a, b, 2049);
      std::size_t prev = active(ts[0]);
      for (std::size_t k = 1; k < ts.size(); ++k) {
        const std::size_t cur = active(ts[k]);
        if (cur == prev) continue;
        const GreenCurve& f = n.args[prev];
        const GreenCurve& g = n.args[cur];
        // f dominates at ts[k-1], g at ts[k]; locate the switch.
        auto g_wins = [&](double t) { return is_max ? g.value(t) >= f.value(t) : g.value(t) <= f.value(t); };
        out.push_back(numeric::bisect_monotone(g_wins, ts[k - 1], ts[k], 1e-14));
        prev = cur;
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> GreenCurve::affine_slopes() const {
  constexpr std::size_t kCap = 64;
  const Node& n = *node_;
  std::vector<double> out;
  switch (n.kind) {
    case Kind::affine:
      out = {n.p0};
      break;
    case Kind::logexp:
      break;
    case Kind::scale:
      for (double s : n.args.front().affine_slopes()) out.push_back(n.p0 * s);
      break;
    case Kind::sum: {
      out = {0.0};
      for (const auto& a : n.args) {
        const auto part = a.affine_slopes();
        std::vector<double> next;
        for (double x : out)
          for (double y : part) next.push_back(x + y);
        out = std::move(next);
        if (out.empty() || out.size() > kCap) return {};
      }
      break;
    }
    case Kind::max:
    case Kind::min:
    case Kind::piecewise:
      for (const auto& a : n.args) {
        const auto part = a.affine_slopes();
        out.insert(out.end(), part.begin(), part.end());
      }
      break;
    case Kind::grid:
      if (n.ts.size() <= kCap)
        for (std::size_t i = 0; i + 1 < n.ts.size(); ++i) out.push_back((n.us[i + 1] - n.us[i]) / (n.ts[i + 1] - n.ts[i]));
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() > kCap) return {};
  return out;
}

// ---------------------------------------------------------------------------

Asymptotics asymptotics(const GreenCurve& u) { return u.asymptotics(); }

std::pair<double, double> sampling_window(const GreenCurve& u, const CurveOptions& opts) {
  if (opts.window > 0.0) return {-opts.window, opts.window};
  auto [lo, hi] = u.tail_window(1e-12);
  lo = std::isfinite(lo) ? std::min(lo, -1.0) - 1.0 : -2.0;
  hi = std::isfinite(hi) ? std::max(hi, 1.0) + 1.0 : 2.0;
  return {std::max(lo, -kMaxT), std::min(hi, kMaxT)};
}

namespace {

// Dense sample positions: uniform with spacing at most 0.01, plus every kink.
std::vector<double> dense_samples(const GreenCurve& u, double lo, double hi, int min_points) {
  const int by_spacing = static_cast<int>(std::ceil((hi - lo) / 0.01)) + 1;
  const int n = std::clamp(std::max(min_points, by_spacing), 2, 200001);
  auto ts = numeric::linspace(lo, hi, n);
  const auto ks = u.kinks(lo, hi);
  ts.insert(ts.end(), ks.begin(), ks.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }),
           ts.end());
  return ts;
}

double tail_limit(double slope, double intercept, bool plus_side) {
  if (std::abs(slope) <= kTieTol) return intercept;
  return (slope > 0.0) == plus_side ? kInf : -kInf;
}

// Minimiser of u(t) - s t near the hull vertex t0. Brent only locates a kink to
// ~1e-8, so kinks and the vertex itself are candidates too.
double refine_contact(const GreenCurve& u, double s, double a, double b, double t0) {
  auto f = [&](double t) { return u.value(t) - s * t; };
  auto [best, fb] = numeric::minimize(f, a, b);
  auto consider = [&](double t) {
    const double v = f(t);
    if (v < fb) {
      fb = v;
      best = t;
    }
  };
  consider(t0);
  for (double k : u.kinks(a, b)) consider(k);
  return best;
}

struct Segment {
  bool follow = false;  // true: the envelope coincides with u
  double start = -kInf;
  double end = kInf;
  double slope = 0.0;
  double intercept = 0.0;
};

}  // namespace

GreenCurve convex_envelope(const GreenCurve& u, const CurveOptions& opts) {
  const auto& as = u.asymptotics();
  if (as.slope_minus > as.slope_plus + 1e-12)
    throw InputError("convex envelope does not exist: asymptotic slope at -inf exceeds slope at +inf");
  if (u.known_convex()) return u;

  const double s_lo = std::min(as.slope_minus, as.slope_plus);
  const double s_hi = std::max(as.slope_minus, as.slope_plus);
  auto [lo, hi] = sampling_window(u, opts);
  const auto ts = dense_samples(u, lo, hi, opts.grid_points);
  const std::size_t n = ts.size();
  std::vector<double> us(n);
  for (std::size_t i = 0; i < n; ++i) us[i] = u.value(ts[i]);

  // Lower hull, monotone chain.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (ts[b] - ts[a]) * (us[i] - us[a]) - (us[b] - us[a]) * (ts[i] - ts[a]);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  auto slope_between = [&](std::size_t a, std::size_t b) { return (us[b] - us[a]) / (ts[b] - ts[a]); };
  // Drop hull edges whose slopes fall outside [s-, s+]: the asymptotic rays lie below them.
  std::size_t first = 0;
  while (first + 1 < hull.size() && slope_between(hull[first], hull[first + 1]) < s_lo) ++first;
  std::size_t last = hull.size() - 1;
  while (last > first && slope_between(hull[last - 1], hull[last]) > s_hi) --last;

  auto idx_clamp = [&](std::ptrdiff_t i) {
    return ts[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1))];
  };

  // Gaps where u rises above the chord only by rounding noise count as contact.
  auto negligible_gap = [&](std::ptrdiff_t i, std::ptrdiff_t k) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(k);
    const double s = slope_between(a, b);
    for (std::size_t j = a + 1; j < b; ++j) {
      const double chord = us[a] + s * (ts[j] - ts[a]);
      if (us[j] - chord > 1e-13 * (1.0 + std::abs(us[j]) + std::abs(ts[j]))) return false;
    }
    return true;
  };

  std::vector<Segment> segs;
  // Left end.
  const auto h0 = static_cast<std::ptrdiff_t>(hull[first]);
  if (hull[first] == 0) {
    segs.push_back({true});
  } else {
    const double ta = refine_contact(u, s_lo, idx_clamp(h0 - 1), idx_clamp(h0 + 1), ts[hull[first]]);
    segs.push_back({false, -kInf, ta, s_lo, u.value(ta) - s_lo * ta});
  }
  for (std::size_t j = first; j < last; ++j) {
    const auto i = static_cast<std::ptrdiff_t>(hull[j]);
    const auto k = static_cast<std::ptrdiff_t>(hull[j + 1]);
    if (k == i + 1 || negligible_gap(i, k)) {
      if (!segs.back().follow) segs.push_back({true});
      continue;
    }
    // Bridge: alternate between the secant slope and the two tangency points.
    const double a0 = idx_clamp(i - 1);
    const double a1 = idx_clamp(std::min(i + 1, k - 1));
    const double b0 = idx_clamp(std::max(k - 1, i + 1));
    const double b1 = idx_clamp(k + 1);
    double ta = ts[static_cast<std::size_t>(i)];
    double tb = ts[static_cast<std::size_t>(k)];
    double s = (u.value(tb) - u.value(ta)) / (tb - ta);
    for (int it = 0; it < 60; ++it) {
      const double na = refine_contact(u, s, a0, a1, ta);
      const double nb = refine_contact(u, s, b0, b1, tb);
      if (!(nb > na)) break;
      const double ns = (u.value(nb) - u.value(na)) / (nb - na);
      const bool done = std::abs(ns - s) <= 1e-15 * std::max(1.0, std::abs(s)) && na == ta && nb == tb;
      ta = na;
      tb = nb;
      s = ns;
      if (done) break;
    }
    segs.push_back({false, ta, tb, s, u.value(ta) - s * ta});
  }
  // Right end.
  const auto hl = static_cast<std::ptrdiff_t>(hull[last]);
  if (hull[last] == n - 1) {
    if (!segs.back().follow) segs.push_back({true});
  } else {
    const double tb = refine_contact(u, s_hi, idx_clamp(hl - 1), idx_clamp(hl + 1), ts[hull[last]]);
    segs.push_back({false, tb, kInf, s_hi, u.value(tb) - s_hi * tb});
  }

  auto line_meet = [](const Segment& a, const Segment& b) {
    if (a.slope == b.slope) return 0.5 * (a.end + b.start);
    return (b.intercept - a.intercept) / (a.slope - b.slope);
  };
  // Resolve breakpoints; follow segments squeezed to nothing are dropped.
  std::vector<double> breaks;
  for (bool changed = true; changed;) {
    changed = false;
    breaks.clear();
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      const Segment& a = segs[i];
      const Segment& b = segs[i + 1];
      if (!a.follow && b.follow) breaks.push_back(a.end);
      else if (a.follow && !b.follow) breaks.push_back(b.start);
      else breaks.push_back(line_meet(a, b));
    }
    for (std::size_t i = 1; i + 1 < segs.size(); ++i) {
      if (segs[i].follow && !(breaks[i] > breaks[i - 1])) {
        segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
    for (std::size_t i = 1; !changed && i < breaks.size(); ++i) {
      if (!(breaks[i] > breaks[i - 1])) {
        // Two consecutive affine pieces whose order flipped by rounding: merge.
        breaks.erase(breaks.begin() + static_cast<std::ptrdiff_t>(i));
        segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      }
    }
  }

  if (segs.size() == 1 && segs.front().follow) return u.assume_convex();
  std::vector<GreenCurve> pieces;
  pieces.reserve(segs.size());
  for (const auto& sgm : segs)
    pieces.push_back(sgm.follow ? u : GreenCurve::affine(sgm.slope, sgm.intercept));
  return GreenCurve::piecewise(std::move(breaks), std::move(pieces)).assume_convex();
}

double sup_difference(const GreenCurve& u, const GreenCurve& v, const CurveOptions& opts) {
  const auto& au = u.asymptotics();
  const auto& av = v.asymptotics();
  const double left = tail_limit(au.slope_minus - av.slope_minus, au.intercept_minus - av.intercept_minus, false);
  const double right = tail_limit(au.slope_plus - av.slope_plus, au.intercept_plus - av.intercept_plus, true);
  auto [l1, h1] = sampling_window(u, opts);
  auto [l2, h2] = sampling_window(v, opts);
  const double lo = std::min(l1, l2);
  const double hi = std::max(h1, h2);
  auto ts = dense_samples(u, lo, hi, opts.grid_points);
  const auto more = v.kinks(lo, hi);
  ts.insert(ts.end(), more.begin(), more.end());
  std::sort(ts.begin(), ts.end());
  double best = -kInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double d = u.value(ts[i]) - v.value(ts[i]);
    if (d > best) {
      best = d;
      arg = i;
    }
  }
  const double a = ts[arg == 0 ? 0 : arg - 1];
  const double b = ts[std::min(arg + 1, ts.size() - 1)];
  const auto refined = numeric::minimize([&](double t) { return v.value(t) - u.value(t); }, a, b);
  best = std::max(best, -refined.second);
  return std::max({best, left, right});
}

double inf_value(const GreenCurve& u, const CurveOptions& opts) {
  return -sup_difference(GreenCurve::affine(0.0, 0.0), u, opts);
}

bool is_convex(const GreenCurve& u, const CurveOptions& opts) {
  if (u.known_convex()) return true;
  const auto& as = u.asymptotics();
  if (as.slope_minus > as.slope_plus + opts.tol) return false;
  const GreenCurve q = convex_envelope(u, opts);
  if (q.same_node(u)) return true;
  return sup_difference(u, q, opts) <= opts.tol;
}

// ---------------------------------------------------------------------------

LegendreTransform::LegendreTransform(GreenCurve convex_curve)
    : curve_(std::move(convex_curve)),
      lo_(curve_.asymptotics().slope_minus),
      hi_(curve_.asymptotics().slope_plus) {
  if (lo_ > hi_) {
    if (lo_ - hi_ > 1e-12) throw InputError("Legendre transform needs slope_minus <= slope_plus");
    lo_ = hi_ = 0.5 * (lo_ + hi_);
  }
}

double LegendreTransform::contact_point(double x) const {
  if (x <= lo_) return -kInf;
  if (x >= hi_) return kInf;
  double a = -1.0;
  double b = 1.0;
  while (curve_.slope_right(a) >= x && a > -kMaxT) a = std::max(2.0 * a, -kMaxT);
  if (curve_.slope_right(a) >= x) return a;
  while (curve_.slope_left(b) <= x && b < kMaxT) b = std::min(2.0 * b, kMaxT);
  if (curve_.slope_left(b) <= x) return b;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (curve_.slope_right(mid) < x)
      a = mid;
    else if (curve_.slope_left(mid) > x)
      b = mid;
    else
      return mid;
    if (b - a <= 1e-12 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (a + b);
}

double LegendreTransform::operator()(double x) const {
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
  if (x < lo_ - slack || x > hi_ + slack) {
    std::ostringstream msg;
    msg << "Legendre transform evaluated at " << x << " outside its domain [" << lo_ << ", " << hi_ << "]";
    throw InputError(msg.str());
  }
  const auto& as = curve_.asymptotics();
  if (hi_ - lo_ <= 1e-14) return -0.5 * (as.intercept_minus + as.intercept_plus);
  if (x <= lo_) return -as.intercept_minus;
  if (x >= hi_) return -as.intercept_plus;
  const double t = contact_point(x);
  return x * t - curve_.value(t);
}

std::vector<double> LegendreTransform::kinks() const {
  std::vector<double> out;
  for (double s : curve_.affine_slopes())
    if (s > lo_ && s < hi_) out.push_back(s);
  return out;
}

LegendreTransform legendre(const GreenCurve& u, const CurveOptions& opts) {
  return LegendreTransform(convex_envelope(u, opts));
}

GreenCurve restricted_conjugate(const GreenCurve& convex_u, double x_lo, double x_hi) {
  const LegendreTransform conj(convex_u);
  const double slack = 1e-12;
  if (x_lo < conj.lo() - slack || x_hi > conj.hi() + slack || x_lo > x_hi + slack)
    throw InputError("restricted conjugate window must lie inside the slope range");
  x_lo = std::clamp(x_lo, conj.lo(), conj.hi());
  x_hi = std::clamp(x_hi, x_lo, conj.hi());
  const bool left_open = x_lo <= conj.lo();
  const bool right_open = x_hi >= conj.hi();
  if (left_open && right_open) return convex_u;
  if (x_hi - x_lo <= 1e-15) return GreenCurve::affine(x_lo, -conj(x_lo));

  std::vector<double> breaks;
  std::vector<GreenCurve> pieces;
  const double t_lo = left_open ? -kInf : conj.contact_point(x_lo);
  const double t_hi = right_open ? kInf : conj.contact_point(x_hi);
  const GreenCurve left = GreenCurve::affine(x_lo, -conj(x_lo));
  const GreenCurve right = GreenCurve::affine(x_hi, -conj(x_hi));
  if (!left_open && !right_open && !(t_hi > t_lo)) {
    // Both slopes touch at the same point: two rays.
    breaks.push_back((right.param1() - left.param1()) / (x_lo - x_hi));
    pieces = {left, right};
  } else {
    if (!left_open) {
      pieces.push_back(left);
      breaks.push_back(t_lo);
    }
    pieces.push_back(convex_u);
    if (!right_open) {
      breaks.push_back(t_hi);
      pieces.push_back(right);
    }
  }
  return GreenCurve::piecewise(std::move(breaks), std::move(pieces)).assume_convex();
}

}  // namespace arakzar
