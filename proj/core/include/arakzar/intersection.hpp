#pragma once

#include <optional>

#include "arakzar/toric_model.hpp"

namespace arakzar {

/// w(t) = u(t) - a0 max(t, 0) - a1 max(-t, 0): the profile left after
/// removing a0 (H0, t+) + a1 (H1, (-t)+). Bounded with limits at both ends.
struct ReducedProfile {
  GreenCurve w;
  double w0 = 0.0;
  bool energy_ready = true;
};

ReducedProfile reduced_profile(const ToricArithDivisor& d);

/// Integrability of a profile: slope of bounded variation with finite energy.
/// Closed-form nodes always pass; grid nodes are tested on their samples
/// (total variation of the slope <= 1e4, energy <= 1e6).
bool integrable_profile(const GreenCurve& u);

struct PairingOptions {
  double abs_tol = 1e-10;
  /// Tail cut-off: outside the window both slopes are within this of their limits.
  double tail_tol = 1e-14;
};

/// deg(D1 . D2) = (d1 w2(0) + d2 w1(0))/2 + sum_p (c1_p d2 + c2_p d1) log p - (1/2) int w1' w2' dt.
/// Throws InputError for non-integrable input.
double intersect(const ToricArithDivisor& d1, const ToricArithDivisor& d2, const PairingOptions& opts = {});

/// -(1/2) int w1' w2' dt, the archimedean energy term.
double energy_term(const GreenCurve& w1, const GreenCurve& w2, const PairingOptions& opts = {});

/// A point of P^1(Q): num/den in lowest terms, or infinity.
struct RationalPoint {
  long long num = 0;
  long long den = 1;
  bool infinite = false;

  static RationalPoint at_infinity() { return {1, 0, true}; }
  static RationalPoint of(long long num, long long den = 1);
};

/// deg(D restricted to the closure of z = zeta).
double height(const ToricArithDivisor& d, const RationalPoint& zeta);

struct HodgeStructure {
  RealPrincipal psi;
  double lambda = 0.0;
  /// sup |u - (profile of psi^ + (0, lambda))|.
  double residual = 0.0;
};

struct HodgeResult {
  double self_deg = 0.0;
  std::optional<HodgeStructure> structure;
};

/// Requires deg(D_K) = 0 within `tol`. Structure present iff |self_deg| <= tol.
HodgeResult hodge_check(const ToricArithDivisor& d, double tol = 1e-9, const PairingOptions& opts = {});

}  // namespace arakzar
