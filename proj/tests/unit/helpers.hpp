#pragma once

// Independent oracles and fixtures shared by the unit suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "arakzar/green_curve.hpp"
#include "arakzar/toric_model.hpp"

namespace testing {

using arakzar::GreenCurve;

inline GreenCurve tplus() { return GreenCurve::positive_part(); }

/// max(0, 1 - |t - c| / w) * h
inline GreenCurve tent(double h = 1.0, double c = 0.0, double w = 1.0) {
  const GreenCurve up = GreenCurve::affine(1.0 / w, 1.0 - c / w);
  const GreenCurve down = GreenCurve::affine(-1.0 / w, 1.0 + c / w);
  return GreenCurve::scale(h, GreenCurve::max({GreenCurve::affine(0.0, 0.0), GreenCurve::min({up, down})}));
}

inline GreenCurve tplus_plus_tent() { return GreenCurve::sum({tplus(), tent()}); }

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// The entropy-type function phi of the explicit example.
inline double phi(double x, double a0, double a1) {
  return -xlogx(1.0 - x) - xlogx(x) + (1.0 - x) * std::log(a0) + x * std::log(a1);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Zeros of phi on either side of its maximiser a1 / (a0 + a1).
inline std::pair<double, double> example_roots(double a0, double a1) {
  const double xm = a1 / (a0 + a1);
  auto f = [&](double x) { return phi(x, a0, a1); };
  return {bisect(f, 0.0, xm), bisect(f, xm, 1.0)};
}

/// Andrew's monotone chain: lower convex hull of points sorted by x.
inline std::vector<std::pair<double, double>> lower_hull(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> h;
  for (const auto& p : pts) {
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h[h.size() - 1];
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross <= 0.0) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  return h;
}

inline double hull_value(const std::vector<std::pair<double, double>>& h, double x) {
  auto it = std::lower_bound(h.begin(), h.end(), std::make_pair(x, -1e300));
  if (it == h.begin()) return h.front().second;
  if (it == h.end()) return h.back().second;
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
}

/// sup_t (x t - u(t)) by dense scan over [lo, hi] plus golden-section polish.
inline double direct_conjugate(const std::function<double(double)>& u, double x, double lo = -60.0, double hi = 60.0,
                               int n = 24001) {
  double best = -1e300;
  double arg = lo;
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
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (x * c - u(c) > x * d - u(d)) b = d;
    else a = c;
  }
  const double t = 0.5 * (a + b);
  return std::max(best, x * t - u(t));
}

/// -(1/2) int f' g' by central differences and the trapezoid rule on [lo, hi].
inline double energy_oracle(const std::function<double(double)>& f, const std::function<double(double)>& g,
                            double lo = -40.0, double hi = 40.0, int n = 400001) {
  const double h = (hi - lo) / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    const double t0 = lo + i * h;
    const double df = (f(t0 + h) - f(t0)) / h;
    const double dg = (g(t0 + h) - g(t0)) / h;
    s += df * dg * h;
  }
  return -0.5 * s;
}

}  // namespace testing
