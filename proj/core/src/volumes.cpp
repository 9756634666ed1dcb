#include "arakzar/volumes.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "arakzar/errors.hpp"
#include "arakzar/numeric.hpp"

namespace arakzar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThetaEmpty = -1e-12;
constexpr double kThetaXTol = 1e-13;
constexpr double kVolumeTol = 1e-11;
// exp(43) is about 4.7e18 < 2^62.
constexpr double kMaxExactLog = 43.0;
constexpr double kNormTol = 1e-9;

}  // namespace

OkounkovData::OkounkovData(const ToricArithDivisor& d, const CurveOptions& opts)
    : fiber_term_(d.fiber_log_sum()), g_max_(-kInf), argmax_(std::numeric_limits<double>::quiet_NaN()) {
  const double lo = -d.a1();
  const double hi = d.a0();
  if (hi < lo - 1e-12) return;
  delta_ = {lo, std::max(lo, hi), false};
  conj_ = std::make_shared<const LegendreTransform>(convex_envelope(d.green(), opts));

  // 0 is a subgradient of u* exactly at the slopes of the envelope at t = 0,
  // so G peaks there with value sum c_p log p + q(0)/2.
  const GreenCurve& q = conj_->curve();
  const double s = 0.5 * (q.slope_left(0.0) + q.slope_right(0.0));
  argmax_ = std::clamp(s, delta_.lo, delta_.hi);
  g_max_ = G(argmax_);
  if (g_max_ < kThetaEmpty) return;
  if (g_max_ <= -kThetaEmpty) {
    // sup G = 0: Theta is the set of maximisers, the subdifferential of q at 0.
    const double a = std::clamp(q.slope_left(0.0), delta_.lo, delta_.hi);
    const double b = std::clamp(q.slope_right(0.0), delta_.lo, delta_.hi);
    theta_ = {a, std::max(a, b), false};
    return;
  }
  double t_lo = delta_.lo;
  double t_hi = delta_.hi;
  if (G(delta_.lo) < 0.0)
    t_lo = numeric::bisect_monotone([this](double y) { return G(y) >= 0.0; }, delta_.lo, argmax_, kThetaXTol);
  if (G(delta_.hi) < 0.0)
    t_hi = numeric::bisect_monotone([this](double y) { return G(y) < 0.0; }, argmax_, delta_.hi, kThetaXTol);
  theta_ = {t_lo, std::max(t_lo, t_hi), false};
}

double OkounkovData::G(double x) const {
  if (!conj_ || x < delta_.lo - 1e-12 || x > delta_.hi + 1e-12)
    throw InputError("concave transform evaluated outside the Okounkov interval");
  const double y = std::clamp(x, conj_->lo(), conj_->hi());
  return fiber_term_ - 0.5 * (*conj_)(y);
}

std::vector<double> OkounkovData::kinks() const {
  std::vector<double> out;
  if (!conj_) return out;
  for (double k : conj_->kinks())
    if (k > delta_.lo && k < delta_.hi) out.push_back(k);
  return out;
}

OkounkovData okounkov(const ToricArithDivisor& d, const CurveOptions& opts) { return OkounkovData(d, opts); }

namespace {

double integrate_g(const OkounkovData& ok, double a, double b) {
  if (!(b > a)) return 0.0;
  const auto ks = ok.kinks();
  const auto res = numeric::integrate([&ok](double x) { return ok.G(x); }, a, b, kVolumeTol, ks);
  if (!std::isfinite(res.value)) throw NumericError("volume integral did not converge");
  return res.value;
}

}  // namespace

std::pair<double, double> volumes(const OkounkovData& ok) {
  if (ok.delta().empty) return {0.0, 0.0};
  const double v = ok.theta().empty ? 0.0 : 2.0 * integrate_g(ok, ok.theta().lo, ok.theta().hi);
  const double vc = 2.0 * integrate_g(ok, ok.delta().lo, ok.delta().hi);
  return {std::max(v, 0.0), vc};
}

double vol(const ToricArithDivisor& d, const CurveOptions& opts) {
  const OkounkovData ok(d, opts);
  if (ok.theta().empty) return 0.0;
  return std::max(0.0, 2.0 * integrate_g(ok, ok.theta().lo, ok.theta().hi));
}

double vol_chi(const ToricArithDivisor& d, const CurveOptions& opts) {
  const OkounkovData ok(d, opts);
  if (ok.delta().empty) return 0.0;
  return 2.0 * integrate_g(ok, ok.delta().lo, ok.delta().hi);
}

double asymptotic_mult(const ToricArithDivisor& d, const OkounkovData& ok, Section xi) {
  if (ok.theta().empty) return kInf;
  return xi == Section::H1 ? d.a1() + ok.theta().lo : d.a0() - ok.theta().hi;
}

double asymptotic_mult(const ToricArithDivisor& d, Section xi, const CurveOptions& opts) {
  return asymptotic_mult(d, OkounkovData(d, opts), xi);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Weights exp(k t / 2 - m u(t) / 2) of the monomials z^k on a fixed t-grid, so that
// |sum_k c_k z^k| exp(-m u / 2) at |z|^2 = e^t, arg z = theta is |sum_k c_k w_k(t) e^{i k theta}|.
class MonomialGrid {
 public:
  MonomialGrid(const GreenCurve& u, int m, const std::vector<long long>& ks, const CurveOptions& opts)
      : u_(u), m_(m), ks_(ks), n_(ks.size()) {
    auto [lo, hi] = sampling_window(u, opts);
    ts_ = numeric::linspace(std::min(lo, -20.0), std::max(hi, 20.0), 801);
    w_.resize(ts_.size() * n_);
    for (std::size_t i = 0; i < ts_.size(); ++i)
      for (std::size_t k = 0; k < n_; ++k) w_[i * n_ + k] = weight(ts_[i], k);
    const auto& as = u.asymptotics();
    tail_plus_.assign(n_, 0.0);
    tail_minus_.assign(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      const double kk = static_cast<double>(ks[k]);
      if (std::abs(kk - m * as.slope_plus) < 1e-9) tail_plus_[k] = std::exp(-0.5 * m * as.intercept_plus);
      if (std::abs(kk - m * as.slope_minus) < 1e-9) tail_minus_[k] = std::exp(-0.5 * m * as.intercept_minus);
    }
    const std::size_t n_theta = 8 * n_ + 16;
    cos_.resize(n_theta * n_);
    sin_.resize(n_theta * n_);
    for (std::size_t j = 0; j < n_theta; ++j)
      for (std::size_t k = 0; k < n_; ++k) {
        const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(n_theta) * static_cast<double>(ks_[k]);
        cos_[j * n_ + k] = std::cos(a);
        sin_[j * n_ + k] = std::sin(a);
      }
  }

  double weight(double t, std::size_t k) const {
    return std::exp(0.5 * static_cast<double>(ks_[k]) * t - 0.5 * m_ * u_.value(t));
  }

  // Limits of the norm as t -> +-inf (only the extreme monomials survive).
  double tails(const std::vector<double>& c) const {
    double plus = 0.0, minus = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      plus += std::abs(c[k]) * tail_plus_[k];
      minus += std::abs(c[k]) * tail_minus_[k];
    }
    return std::max(plus, minus);
  }

  // True if the sampled norm at theta = 0 or pi already exceeds `bound`.
  bool exceeds_on_real_axis(const std::vector<double>& c, double bound) const {
    if (tails(c) > bound) return true;
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      const double* w = &w_[i * n_];
      double even = 0.0, odd = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        const double v = c[k] * w[k];
        if (ks_[k] % 2 == 0) even += v;
        else odd += v;
      }
      if (std::abs(even) + std::abs(odd) > bound) return true;
    }
    return false;
  }

  // sup_t sum_k |c_k| w_k(t): an upper bound for the norm, attained when the phases align.
  double triangle(const std::vector<double>& c) const {
    auto f = [&](double t) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k)
        if (c[k] != 0.0) s += std::abs(c[k]) * weight(t, k);
      return s;
    };
    return refine_max(c, [&](std::size_t i) {
      const double* w = &w_[i * n_];
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) s += std::abs(c[k]) * w[k];
      return s;
    }, f);
  }

  double sup_norm(const std::vector<double>& c) const { return norm_search(c, kInf); }

  /// Whether the norm exceeds `bound`; stops at the first witness.
  bool norm_exceeds(const std::vector<double>& c, double bound) const { return norm_search(c, bound) > bound; }

 private:
  // Max of a function sampled on the grid, refined by Brent around each local maximum.
  template <class OnGrid, class Direct>
  double refine_max(const std::vector<double>& c, OnGrid on_grid, Direct direct) const {
    std::vector<double> vals(ts_.size());
    double best = tails(c);
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      vals[i] = on_grid(i);
      best = std::max(best, vals[i]);
    }
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
      const bool right_ok = i + 1 == ts_.size() || vals[i] >= vals[i + 1];
      if (!left_ok || !right_ok) continue;
      const double a = ts_[i == 0 ? 0 : i - 1];
      const double b = ts_[std::min(i + 1, ts_.size() - 1)];
      const auto r = numeric::minimize([&](double t) { return -direct(t); }, a, b);
      best = std::max(best, -r.second);
    }
    return best;
  }

  // Returns the norm, or some value above `stop` as soon as one is found.
  double norm_search(const std::vector<double>& c, double stop) const {
    const std::size_t n_theta = cos_.size() / n_;
    auto scan = [&](const double* w, std::size_t* arg) {
      double best = 0.0;
      for (std::size_t j = 0; j < n_theta; ++j) {
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
          const double v = c[k] * w[k];
          re += v * cos_[j * n_ + k];
          im += v * sin_[j * n_ + k];
        }
        const double mod = std::hypot(re, im);
        if (mod > best) {
          best = mod;
          *arg = j;
        }
      }
      return best;
    };
    auto modulus = [&](const double* w, double theta) {
      std::complex<double> s = 0.0;
      for (std::size_t k = 0; k < n_; ++k)
        if (c[k] != 0.0) s += c[k] * std::polar(w[k], static_cast<double>(ks_[k]) * theta);
      return std::abs(s);
    };
    auto refined = [&](const double* w) {
      std::size_t arg = 0;
      const double best = scan(w, &arg);
      const double h = kTwoPi / static_cast<double>(n_theta);
      const double j = static_cast<double>(arg);
      const auto r = numeric::minimize([&](double th) { return -modulus(w, th); }, h * (j - 1), h * (j + 1));
      return std::max(best, -r.second);
    };

    double best = tails(c);
    if (best > stop) return best;
    std::vector<double> vals(ts_.size());
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      std::size_t arg = 0;
      vals[i] = scan(&w_[i * n_], &arg);
      best = std::max(best, vals[i]);
      if (best > stop) return best;
    }
    std::vector<double> buf(n_);
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
      const bool right_ok = i + 1 == ts_.size() || vals[i] >= vals[i + 1];
      if (!left_ok || !right_ok) continue;
      const double a = ts_[i == 0 ? 0 : i - 1];
      const double b = ts_[std::min(i + 1, ts_.size() - 1)];
      const auto r = numeric::minimize(
          [&](double t) {
            for (std::size_t k = 0; k < n_; ++k) buf[k] = weight(t, k);
            return -refined(buf.data());
          },
          a, b);
      best = std::max(best, -r.second);
      if (best > stop) return best;
    }
    return best;
  }

  GreenCurve u_;
  int m_;
  std::vector<long long> ks_;
  std::size_t n_;
  std::vector<double> ts_;
  std::vector<double> w_;
  std::vector<double> tail_plus_, tail_minus_;
  // cos / sin of k theta_j on the theta grid.
  std::vector<double> cos_, sin_;
};

}  // namespace

double section_sup_norm(const GreenCurve& u, int m, const std::vector<long long>& ks,
                        const std::vector<double>& coeffs, const CurveOptions& opts) {
  if (ks.size() != coeffs.size()) throw InputError("section_sup_norm: size mismatch");
  return MonomialGrid(u, m, ks, opts).sup_norm(coeffs);
}

namespace {

std::int64_t enumerate_sections(const GreenCurve& u, int m, const std::vector<long long>& ks,
                                const std::vector<double>& log_box, const std::vector<std::int64_t>& fl,
                                const CurveOptions& opts) {
  const std::size_t n = ks.size();
  const MonomialGrid grid(u, m, ks, opts);
  // Per-monomial norm of n_k z^k / Lambda is |n_k| exp(-log_box_k).
  std::vector<double> unit(n);
  for (std::size_t i = 0; i < n; ++i) unit[i] = std::exp(-log_box[i]);
  std::vector<std::int64_t> cur(n);
  for (std::size_t i = 0; i < n; ++i) cur[i] = -fl[i];
  std::int64_t count = 0;
  std::vector<double> coeffs(n);
  const double bound = 1.0 + kNormTol;
  while (true) {
    int nonzero = 0;
    double triangle = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] != 0) ++nonzero;
      triangle += static_cast<double>(std::llabs(cur[i])) * unit[i];
    }
    if (nonzero <= 1 || triangle <= bound) {
      ++count;
    } else {
      for (std::size_t i = 0; i < n; ++i) coeffs[i] = static_cast<double>(cur[i]);
      if (!grid.exceeds_on_real_axis(coeffs, bound) && (grid.triangle(coeffs) <= bound || !grid.norm_exceeds(coeffs, bound)))
        ++count;
    }
    std::size_t i = 0;
    while (i < n && cur[i] == fl[i]) {
      cur[i] = -fl[i];
      ++i;
    }
    if (i == n) break;
    ++cur[i];
  }
  return count;
}

}  // namespace

SectionCount count_sections(const ToricArithDivisor& d, const OkounkovData& ok, int m, const CountOptions& opts) {
  if (m < 1) throw InputError("count_sections requires m >= 1");
  SectionCount out;
  out.exact = 1;
  if (ok.delta().empty) return out;
  const long long kmin = numeric::robust_ceil(-static_cast<double>(m) * d.a1());
  const long long kmax = numeric::robust_floor(static_cast<double>(m) * d.a0());
  if (kmin > kmax) return out;
  double log_lambda = 0.0;
  for (const auto& [p, c] : d.fibers())
    log_lambda += static_cast<double>(numeric::robust_floor(m * c)) * std::log(static_cast<double>(p));
  const auto* conj = ok.conjugate();
  const double n_mono = static_cast<double>(kmax - kmin + 1);
  const double log_n1 = std::log(n_mono + 1.0);
  long double product = 1.0L;
  bool representable = true;
  for (long long k = kmin; k <= kmax; ++k) {
    const double x = std::clamp(static_cast<double>(k) / m, conj->lo(), conj->hi());
    const double L = -0.5 * m * (*conj)(x) + log_lambda;
    out.ks.push_back(k);
    out.log_box.push_back(L);
    if (L > kMaxExactLog) {
      out.box_floor.push_back(-1);
      out.log_count_upper += L + std::log(2.0);
      representable = false;
    } else {
      const std::int64_t f = numeric::robust_floor(std::exp(L));
      out.box_floor.push_back(f);
      out.log_count_upper += std::log(2.0 * static_cast<double>(f) + 1.0);
      product *= 2.0L * static_cast<long double>(f) + 1.0L;
    }
    const double Ll = L - log_n1;
    if (Ll > kMaxExactLog)
      out.log_count_lower += Ll + std::log(2.0);
    else
      out.log_count_lower += std::log(2.0 * static_cast<double>(numeric::robust_floor(std::exp(Ll))) + 1.0);
  }
  out.exact.reset();
  if (representable && product <= static_cast<long double>(opts.exact_cap)) {
    // Work with the fiber-free profile shifted by -2 log Lambda / m so that the
    // lattice becomes Z^N with the norm of n z^k equal to |n| exp(-log_box).
    const GreenCurve shifted = combine_curves({{1.0, d.green()}, {1.0, GreenCurve::affine(0.0, 2.0 * log_lambda / m)}});
    out.exact = enumerate_sections(shifted, m, out.ks, out.log_box, out.box_floor, opts.curve);
  }
  return out;
}

SectionCount count_sections(const ToricArithDivisor& d, int m, const CountOptions& opts) {
  return count_sections(d, OkounkovData(d, opts.curve), m, opts);
}

ChiBracket chi_estimate(const ToricArithDivisor& d, const OkounkovData& ok, int m) {
  if (m < 1) throw InputError("chi_estimate requires m >= 1");
  if (ok.delta().empty) throw InputError("chi_estimate requires deg(D_K) = a0 + a1 >= 0");
  const SectionCount c = count_sections(d, ok, m, CountOptions{0, {}});
  const double n = static_cast<double>(c.ks.size());
  double s = 0.0;
  for (double L : c.log_box) s += std::log(2.0) + L;
  ChiBracket out;
  out.upper = s;
  out.lower = n > 0.0 ? s - n * std::log(n) : s;
  return out;
}

ChiBracket chi_estimate(const ToricArithDivisor& d, int m, const CurveOptions& opts) {
  return chi_estimate(d, OkounkovData(d, opts), m);
}

}  // namespace arakzar
