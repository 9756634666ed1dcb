#include "arakzar/toric_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arakzar/errors.hpp"

namespace arakzar {

bool is_prime(long long n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (long long d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::map<long long, int> factorize(long long n) {
  if (n == 0) throw InputError("cannot factorize 0");
  std::map<long long, int> out;
  unsigned long long m = n < 0 ? 0ULL - static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
  for (unsigned long long d = 2; d * d <= m; ++d) {
    while (m % d == 0) {
      ++out[static_cast<long long>(d)];
      m /= d;
    }
  }
  if (m > 1) ++out[static_cast<long long>(m)];
  return out;
}

ToricArithDivisor::ToricArithDivisor() : green_(GreenCurve::affine(0.0, 0.0)) {}

ToricArithDivisor::ToricArithDivisor(double a0, double a1, FiberMap fibers, GreenCurve green, double tol)
    : a0_(a0), a1_(a1), green_(std::move(green)) {
  if (!std::isfinite(a0) || !std::isfinite(a1)) throw InputError("divisor coefficients must be finite");
  for (const auto& [p, c] : fibers) {
    if (!is_prime(p)) throw InputError("fiber key " + std::to_string(p) + " is not a prime");
    if (!std::isfinite(c)) throw InputError("fiber coefficient must be finite");
    if (c != 0.0) fibers_.emplace(p, c);
  }
  const auto& as = green_.asymptotics();
  auto mismatch = [tol](double x, double y) { return std::abs(x - y) > tol * std::max(1.0, std::abs(y)); };
  if (mismatch(as.slope_plus, a0) || mismatch(as.slope_minus, -a1)) {
    std::ostringstream msg;
    msg << "Green profile incompatible with divisor: slopes (" << as.slope_minus << ", " << as.slope_plus
        << ") but expected (" << -a1 << ", " << a0 << ")";
    throw InputError(msg.str());
  }
  if (!std::isfinite(as.intercept_minus) || !std::isfinite(as.intercept_plus))
    throw InputError("Green profile must have finite asymptotic intercepts");
}

double ToricArithDivisor::fiber_log_sum() const {
  double s = 0.0;
  for (const auto& [p, c] : fibers_) s += c * std::log(static_cast<double>(p));
  return s;
}

double ToricArithDivisor::fiber(long long p) const {
  auto it = fibers_.find(p);
  return it == fibers_.end() ? 0.0 : it->second;
}

namespace {

struct Accumulator {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::pair<double, GreenCurve>> terms;

  void add(double coef, const GreenCurve& c) {
    if (coef == 0.0) return;
    switch (c.kind()) {
      case GreenCurve::Kind::affine:
        slope += coef * c.param0();
        intercept += coef * c.param1();
        return;
      case GreenCurve::Kind::sum:
        for (const auto& child : c.children()) add(coef, child);
        return;
      case GreenCurve::Kind::scale:
        add(coef * c.param0(), c.children().front());
        return;
      default:
        break;
    }
    for (auto& [k, existing] : terms) {
      if (existing.same_node(c)) {
        k += coef;
        return;
      }
    }
    terms.emplace_back(coef, c);
  }
};

}  // namespace

GreenCurve combine_curves(const std::vector<std::pair<double, GreenCurve>>& terms) {
  Accumulator acc;
  for (const auto& [k, c] : terms) acc.add(k, c);
  std::vector<GreenCurve> parts;
  for (const auto& [k, c] : acc.terms)
    if (k != 0.0) parts.push_back(GreenCurve::scale(k, c));
  if (acc.slope != 0.0 || acc.intercept != 0.0 || parts.empty())
    parts.push_back(GreenCurve::affine(acc.slope, acc.intercept));
  if (parts.size() == 1) return parts.front();
  return GreenCurve::sum(std::move(parts));
}

ToricArithDivisor linear_combine(const std::vector<std::pair<double, ToricArithDivisor>>& terms) {
  double a0 = 0.0;
  double a1 = 0.0;
  FiberMap fibers;
  std::vector<std::pair<double, GreenCurve>> curves;
  for (const auto& [k, d] : terms) {
    a0 += k * d.a0();
    a1 += k * d.a1();
    for (const auto& [p, c] : d.fibers()) fibers[p] += k * c;
    curves.emplace_back(k, d.green());
  }
  return ToricArithDivisor(a0, a1, std::move(fibers), combine_curves(curves));
}

ToricArithDivisor operator+(const ToricArithDivisor& a, const ToricArithDivisor& b) {
  return linear_combine({{1.0, a}, {1.0, b}});
}

ToricArithDivisor operator-(const ToricArithDivisor& a, const ToricArithDivisor& b) {
  return linear_combine({{1.0, a}, {-1.0, b}});
}

ToricArithDivisor operator*(double k, const ToricArithDivisor& d) { return linear_combine({{k, d}}); }

ToricArithDivisor max_divisor(const std::vector<ToricArithDivisor>& divisors) {
  if (divisors.empty()) throw InputError("max_divisor needs at least one divisor");
  if (divisors.size() == 1) return divisors.front();
  double a0 = divisors.front().a0();
  double a1 = divisors.front().a1();
  std::map<long long, bool> primes;
  std::vector<GreenCurve> greens;
  for (const auto& d : divisors) {
    a0 = std::max(a0, d.a0());
    a1 = std::max(a1, d.a1());
    for (const auto& [p, c] : d.fibers()) primes[p] = true;
    greens.push_back(d.green());
  }
  FiberMap fibers;
  for (const auto& [p, unused] : primes) {
    double c = divisors.front().fiber(p);
    for (const auto& d : divisors) c = std::max(c, d.fiber(p));
    fibers[p] = c;
  }
  bool all_same = true;
  for (const auto& g : greens) all_same = all_same && g.same_node(greens.front());
  GreenCurve g = all_same ? greens.front() : GreenCurve::max(std::move(greens));
  return ToricArithDivisor(a0, a1, std::move(fibers), std::move(g));
}

ToricArithDivisor principal(const PrincipalMonomial& m) {
  if (m.num == 0) throw InputError("principal divisor of the zero function");
  if (m.den == 0) throw InputError("principal monomial with zero denominator");
  RealPrincipal psi;
  psi.k = static_cast<double>(m.k);
  for (const auto& [p, e] : factorize(m.num)) psi.prime_exponents[p] += e;
  for (const auto& [p, e] : factorize(m.den)) psi.prime_exponents[p] -= e;
  return principal(psi);
}

ToricArithDivisor principal(const RealPrincipal& psi) {
  double log_q = 0.0;
  FiberMap fibers;
  for (const auto& [p, e] : psi.prime_exponents) {
    if (!is_prime(p)) throw InputError("principal exponent key " + std::to_string(p) + " is not a prime");
    log_q += e * std::log(static_cast<double>(p));
    fibers[p] = e;
  }
  return ToricArithDivisor(-psi.k, psi.k, std::move(fibers), GreenCurve::affine(-psi.k, -2.0 * log_q));
}

ToricArithDivisor constant_divisor(double lambda) {
  return ToricArithDivisor(0.0, 0.0, {}, GreenCurve::affine(0.0, lambda));
}

ToricArithDivisor canonical_h0() { return ToricArithDivisor(1.0, 0.0, {}, GreenCurve::positive_part()); }
ToricArithDivisor canonical_h1() { return ToricArithDivisor(0.0, 1.0, {}, GreenCurve::negative_part()); }

ToricArithDivisor horizontal(double a0, double a1, GreenCurve u) {
  return ToricArithDivisor(a0, a1, {}, std::move(u));
}

bool is_effective(const ToricArithDivisor& d, const CurveOptions& opts) {
  const double tol = opts.tol;
  if (d.a0() < -tol || d.a1() < -tol) return false;
  for (const auto& [p, c] : d.fibers())
    if (c < -tol) return false;
  return inf_value(d.green(), opts) >= -tol;
}

FiberNormalization normalize_fibers(const ToricArithDivisor& d) {
  FiberNormalization out;
  out.shift.prime_exponents = d.fibers();
  if (d.fibers().empty()) {
    out.fiber_free = d;
    return out;
  }
  const double shift = 2.0 * d.fiber_log_sum();
  out.fiber_free = ToricArithDivisor(d.a0(), d.a1(), {}, combine_curves({{1.0, d.green()}, {1.0, GreenCurve::affine(0.0, shift)}}));
  return out;
}

}  // namespace arakzar
