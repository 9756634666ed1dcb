#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace arakzar::numeric {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol` or `max_panels` is reached. Known
/// discontinuities of the integrand or its derivative should be passed in
/// `breaks`; points outside (a, b) are ignored.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, std::span<const double> breaks = {},
                           int max_panels = 20000);

/// Brent minimisation of a unimodal function on [a, b]. Returns (argmin, min).
std::pair<double, double> minimize(const std::function<double(double)>& f, double a, double b);

/// Smallest x in [a, b] with pred(x) true, assuming pred is monotone (false...true).
/// Returns b when pred(a) is false up to b; `a` when pred(a) holds.
double bisect_monotone(const std::function<bool(double)>& pred, double a, double b,
                       double x_tol = 1e-13, int max_iter = 200);

/// Evenly spaced samples, endpoints included.
std::vector<double> linspace(double lo, double hi, int n);

/// Floor of x that tolerates representation error, e.g. floor(10 * 0.1) == 1.
long long robust_floor(double x, double slack = 1e-9);
long long robust_ceil(double x, double slack = 1e-9);

}  // namespace arakzar::numeric
