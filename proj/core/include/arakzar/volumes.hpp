#pragma once

// Okounkov data of a toric divisor: Delta = [-a1, a0], the concave transform
// G(x) = sum_p c_p log p - u*(x)/2 and the locus Theta = {G >= 0}.
// Volumes are vol = 2 int_Theta G and vol_chi = 2 int_Delta G.

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "arakzar/toric_model.hpp"

namespace arakzar {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;

  double length() const { return empty ? 0.0 : hi - lo; }
  bool contains(double x) const { return !empty && x >= lo && x <= hi; }
};

class OkounkovData {
 public:
  OkounkovData(const ToricArithDivisor& d, const CurveOptions& opts = {});

  const Interval& delta() const { return delta_; }
  const Interval& theta() const { return theta_; }
  /// G on delta; throws InputError outside.
  double G(double x) const;
  /// sup_Delta G and a maximiser (-inf / NaN when delta is empty).
  double g_max() const { return g_max_; }
  double argmax() const { return argmax_; }
  /// sum_p c_p log p.
  double fiber_term() const { return fiber_term_; }
  /// Points of delta where G may fail to be smooth.
  std::vector<double> kinks() const;
  /// The conjugate u* on delta; nullptr when delta is empty.
  const LegendreTransform* conjugate() const { return conj_.get(); }

 private:
  Interval delta_;
  Interval theta_;
  double fiber_term_ = 0.0;
  double g_max_;
  double argmax_;
  std::shared_ptr<const LegendreTransform> conj_;
};

OkounkovData okounkov(const ToricArithDivisor& d, const CurveOptions& opts = {});

double vol(const ToricArithDivisor& d, const CurveOptions& opts = {});
double vol_chi(const ToricArithDivisor& d, const CurveOptions& opts = {});
/// Both volumes from one Okounkov computation.
std::pair<double, double> volumes(const OkounkovData& ok);

enum class Section { H0, H1 };

/// mu_{Q,xi}: a1 + min Theta at H1, a0 - max Theta at H0; +inf when Theta is empty.
double asymptotic_mult(const ToricArithDivisor& d, Section xi, const CurveOptions& opts = {});
double asymptotic_mult(const ToricArithDivisor& d, const OkounkovData& ok, Section xi);

struct SectionCount {
  double log_count_lower = 0.0;
  double log_count_upper = 0.0;
  std::optional<std::int64_t> exact;
  /// Monomial exponents k of H^0(X, mD) in increasing order.
  std::vector<long long> ks;
  /// log(B_k Lambda) = -(m/2) u*(k/m) + sum_p floor(m c_p) log p.
  std::vector<double> log_box;
  /// floor(B_k Lambda); -1 if it does not fit in 62 bits.
  std::vector<std::int64_t> box_floor;
};

struct CountOptions {
  /// Enumerate exactly when the box product is at most this many lattice points.
  std::int64_t exact_cap = 1000000;
  CurveOptions curve;
};

SectionCount count_sections(const ToricArithDivisor& d, int m, const CountOptions& opts = {});
SectionCount count_sections(const ToricArithDivisor& d, const OkounkovData& ok, int m, const CountOptions& opts = {});

struct ChiBracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bracket for chi^(H^0(X, mD), sup norm) from the inner and outer boxes of the unit ball.
ChiBracket chi_estimate(const ToricArithDivisor& d, int m, const CurveOptions& opts = {});
ChiBracket chi_estimate(const ToricArithDivisor& d, const OkounkovData& ok, int m);

/// Weighted sup norm sup_z |sum_k c_k z^k| exp(-(m/2) u(log|z|^2)), computed numerically.
double section_sup_norm(const GreenCurve& u, int m, const std::vector<long long>& ks,
                        const std::vector<double>& coeffs, const CurveOptions& opts = {});

}  // namespace arakzar
