#pragma once

// Rotation-invariant Green functions on P^1(C) in slope coordinates.
//
// A Green function g(z) that only depends on |z| is stored as its profile
// u(t) with g(z) = u(log|z|^2). Positivity of the first Chern current is
// convexity of u, the greatest Green minorant with positive current is the
// convex envelope of u, and monomial sup norms are governed by the Legendre
// transform u*(x) = sup_t (x t - u(t)).

#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace arakzar {

/// Asymptotic lines of a profile: u(t) - (slope_minus t + intercept_minus) -> 0
/// as t -> -inf and likewise with the plus pair at +inf.
struct Asymptotics {
  double slope_minus = 0.0;
  double intercept_minus = 0.0;
  double slope_plus = 0.0;
  double intercept_plus = 0.0;

  double left_line(double t) const { return slope_minus * t + intercept_minus; }
  double right_line(double t) const { return slope_plus * t + intercept_plus; }
};

/// Immutable expression tree for a continuous profile u: R -> R with affine asymptotes.
///
/// Copies share the underlying node; all evaluation is const and thread-safe.
class GreenCurve {
 public:
  enum class Kind { affine, logexp, max, min, sum, scale, grid, piecewise };

  /// The zero profile.
  GreenCurve();

  static GreenCurve affine(double slope, double intercept);
  /// t -> log(a + b e^t), a, b > 0.
  static GreenCurve logexp(double a, double b);
  static GreenCurve max(std::vector<GreenCurve> args);
  static GreenCurve min(std::vector<GreenCurve> args);
  static GreenCurve sum(std::vector<GreenCurve> args);
  static GreenCurve scale(double k, GreenCurve arg);
  /// Piecewise-linear interpolation of samples, extended linearly by the declared
  /// slopes. The declared intercepts must match the boundary samples.
  static GreenCurve grid(std::vector<double> ts, std::vector<double> us, Asymptotics declared);
  /// pieces[i] is used on [breaks[i-1], breaks[i]]; pieces must agree at the breaks.
  static GreenCurve piecewise(std::vector<double> breaks, std::vector<GreenCurve> pieces);

  /// t -> max(t, 0).
  static GreenCurve positive_part();
  /// t -> max(-t, 0).
  static GreenCurve negative_part();

  /// Same profile, flagged as convex. The caller guarantees convexity
  /// (used for envelopes and restricted Legendre conjugates).
  GreenCurve assume_convex() const;

  double operator()(double t) const { return value(t); }
  double value(double t) const;
  double slope_left(double t) const;
  double slope_right(double t) const;

  const Asymptotics& asymptotics() const;
  Kind kind() const;
  /// Convex by construction: affine, logexp, and max / sum / nonnegative
  /// multiples of convex curves, or an explicit assume_convex().
  bool known_convex() const;
  bool has_grid() const;

  /// (lo, hi) such that u is within `tol` of its left asymptote on (-inf, lo]
  /// and of its right asymptote on [hi, inf). Infinite when no bound is needed.
  std::pair<double, double> tail_window(double tol) const;
  /// Points in [lo, hi] where the derivative may jump.
  std::vector<double> kinks(double lo, double hi) const;
  /// Slopes of affine stretches the curve may contain (a superset is fine).
  std::vector<double> affine_slopes() const;

  // Structural accessors, mostly for serialization.
  double param0() const;  ///< affine slope, logexp a, scale k
  double param1() const;  ///< affine intercept, logexp b
  const std::vector<GreenCurve>& children() const;
  const std::vector<double>& knots() const;    ///< grid ts or piecewise breaks
  const std::vector<double>& samples() const;  ///< grid us

  bool same_node(const GreenCurve& other) const { return node_ == other.node_; }

  struct Node;

 private:
  explicit GreenCurve(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static GreenCurve extremum(std::vector<GreenCurve> args, bool is_max);
  std::shared_ptr<const Node> node_;
};

/// Numerical knobs for the grid-backed operations.
struct CurveOptions {
  int grid_points = 4001;
  /// Half-width of the sampling window; 0 picks it from the tail behaviour.
  double window = 0.0;
  /// Pointwise tolerance for convexity and comparison tests.
  double tol = 1e-9;
};

Asymptotics asymptotics(const GreenCurve& u);

/// Sampling window [lo, hi] that covers every non-asymptotic feature of u.
std::pair<double, double> sampling_window(const GreenCurve& u, const CurveOptions& opts = {});

bool is_convex(const GreenCurve& u, const CurveOptions& opts = {});

/// Greatest convex minorant u** of u. Requires slope_minus <= slope_plus
/// (otherwise no convex minorant exists) and throws InputError.
GreenCurve convex_envelope(const GreenCurve& u, const CurveOptions& opts = {});

/// Largest value of u - v over a dense sample (plus tails). Used for order tests.
double sup_difference(const GreenCurve& u, const GreenCurve& v, const CurveOptions& opts = {});
double inf_value(const GreenCurve& u, const CurveOptions& opts = {});

/// Convex conjugate u*(x) = sup_t (x t - u(t)) on [slope_minus, slope_plus].
class LegendreTransform {
 public:
  explicit LegendreTransform(GreenCurve convex_curve);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Throws InputError for x outside [lo, hi].
  double operator()(double x) const;
  /// A point t where x is a subgradient of the curve (+-inf at open ends).
  double contact_point(double x) const;
  /// x-values where u* may have a kink.
  std::vector<double> kinks() const;
  const GreenCurve& curve() const { return curve_; }

 private:
  GreenCurve curve_;
  double lo_, hi_;
};

/// u* computed through the convex envelope (so u* = (u**)*).
LegendreTransform legendre(const GreenCurve& u, const CurveOptions& opts = {});

/// sup over x in [x_lo, x_hi] of (x t - u*(x)): the convex curve whose slopes are
/// clamped to the window. Requires u convex and [x_lo, x_hi] inside its slope range.
GreenCurve restricted_conjugate(const GreenCurve& convex_u, double x_lo, double x_hi);

}  // namespace arakzar
