#include "arakzar/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "arakzar/errors.hpp"
#include "arakzar/numeric.hpp"

namespace arakzar {

namespace {

constexpr double kMaxT = 800.0;
constexpr double kMaxSlopeVariation = 1e4;
constexpr double kMaxEnergy = 1e6;

bool grid_integrable(const GreenCurve& g) {
  const auto& ts = g.knots();
  const auto& us = g.samples();
  const auto& as = g.asymptotics();
  double prev = as.slope_minus;
  double variation = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double dt = ts[i + 1] - ts[i];
    const double s = (us[i + 1] - us[i]) / dt;
    variation += std::abs(s - prev);
    const double mid = 0.5 * (ts[i] + ts[i + 1]);
    const double ref = mid < 0.0 ? as.slope_minus : as.slope_plus;
    energy += (s - ref) * (s - ref) * dt;
    prev = s;
  }
  variation += std::abs(as.slope_plus - prev);
  return std::isfinite(variation) && variation <= kMaxSlopeVariation && energy <= kMaxEnergy;
}

}  // namespace

bool integrable_profile(const GreenCurve& u) {
  if (!u.has_grid()) return true;
  if (u.kind() == GreenCurve::Kind::grid) return grid_integrable(u);
  for (const auto& c : u.children())
    if (!integrable_profile(c)) return false;
  return true;
}

ReducedProfile reduced_profile(const ToricArithDivisor& d) {
  ReducedProfile r;
  r.w = combine_curves({{1.0, d.green()},
                        {-d.a0(), GreenCurve::positive_part()},
                        {-d.a1(), GreenCurve::negative_part()}});
  r.w0 = r.w.value(0.0);
  r.energy_ready = integrable_profile(d.green());
  return r;
}

double energy_term(const GreenCurve& w1, const GreenCurve& w2, const PairingOptions& opts) {
  auto [lo1, hi1] = w1.tail_window(opts.tail_tol);
  auto [lo2, hi2] = w2.tail_window(opts.tail_tol);
  double lo = std::min({lo1, lo2, 0.0});
  double hi = std::max({hi1, hi2, 0.0});
  lo = std::max(lo - 1.0, -kMaxT);
  hi = std::min(hi + 1.0, kMaxT);
  std::vector<double> breaks = w1.kinks(lo, hi);
  const auto more = w2.kinks(lo, hi);
  breaks.insert(breaks.end(), more.begin(), more.end());
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  // Kinks may split a panel arbitrarily close to a node; slope_right is the
  // a.e. derivative, which is all the integral sees.
  auto f = [&](double t) { return w1.slope_right(t) * w2.slope_right(t); };
  const int max_panels = std::max<int>(20000, 4 * static_cast<int>(breaks.size()));
  const auto res = numeric::integrate(f, lo, hi, opts.abs_tol, breaks, max_panels);
  if (!std::isfinite(res.value)) throw NumericError("energy integral did not converge");
  return -0.5 * res.value;
}

double intersect(const ToricArithDivisor& d1, const ToricArithDivisor& d2, const PairingOptions& opts) {
  const ReducedProfile r1 = reduced_profile(d1);
  const ReducedProfile r2 = reduced_profile(d2);
  if (!r1.energy_ready || !r2.energy_ready) throw InputError("pairing undefined for non-integrable divisor");
  const double deg1 = d1.degree();
  const double deg2 = d2.degree();
  double total = 0.5 * (deg1 * r2.w0 + deg2 * r1.w0);
  std::set<long long> primes;
  for (const auto& [p, c] : d1.fibers()) primes.insert(p);
  for (const auto& [p, c] : d2.fibers()) primes.insert(p);
  for (long long p : primes)
    total += (d1.fiber(p) * deg2 + d2.fiber(p) * deg1) * std::log(static_cast<double>(p));
  return total + energy_term(r1.w, r2.w, opts);
}

RationalPoint RationalPoint::of(long long num, long long den) {
  if (num == 0 && den == 0) throw InputError("0/0 is not a point of P^1");
  if (den == 0) return at_infinity();
  if (num == 0) return {0, 1, false};
  const long long g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return {num, den, false};
}

double height(const ToricArithDivisor& d, const RationalPoint& zeta) {
  const auto& as = d.green().asymptotics();
  const double fibers = d.fiber_log_sum();
  if (zeta.infinite || zeta.den == 0) return fibers + 0.5 * as.intercept_plus;
  if (zeta.num == 0) return fibers + 0.5 * as.intercept_minus;
  const double a = std::abs(static_cast<double>(zeta.num));
  const double b = std::abs(static_cast<double>(zeta.den));
  return d.a0() * std::log(b) + d.a1() * std::log(a) + fibers + 0.5 * d.green().value(2.0 * (std::log(a) - std::log(b)));
}

HodgeResult hodge_check(const ToricArithDivisor& d, double tol, const PairingOptions& opts) {
  if (std::abs(d.degree()) > tol) throw InputError("hodge_check requires deg(D_K) = a0 + a1 = 0");
  HodgeResult out;
  out.self_deg = intersect(d, d, opts);
  if (std::abs(out.self_deg) > tol) return out;
  HodgeStructure s;
  s.psi.k = -d.a0();
  s.psi.prime_exponents = d.fibers();
  const double beta_plus = d.green().asymptotics().intercept_plus;
  s.lambda = beta_plus + 2.0 * d.fiber_log_sum();
  const GreenCurve line = GreenCurve::affine(d.a0(), beta_plus);
  CurveOptions copts;
  s.residual = std::max({0.0, sup_difference(d.green(), line, copts), sup_difference(line, d.green(), copts)});
  out.structure = s;
  return out;
}

}  // namespace arakzar
