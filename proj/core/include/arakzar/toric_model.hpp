#pragma once

// Arithmetic R-divisors on P^1 over Z with rotation-invariant Green functions.
//
// D = a0 H0 + a1 H1 + sum_p c_p F_p where H0 = {T0 = 0} is the section z = inf,
// H1 = {T1 = 0} the section z = 0 and F_p the fiber over p. The Green function
// is g(z) = u(log|z|^2) for a profile u with slope a0 at +inf and -a1 at -inf.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "arakzar/green_curve.hpp"

namespace arakzar {

using FiberMap = std::map<long long, double>;

bool is_prime(long long n);

class ToricArithDivisor {
 public:
  /// The zero divisor (0, 0).
  ToricArithDivisor();
  /// Validates Green compatibility (slopes a0 / -a1 within `tol` relative)
  /// and that fiber keys are primes. Zero fiber entries are dropped.
  ToricArithDivisor(double a0, double a1, FiberMap fibers, GreenCurve green, double tol = 1e-9);

  double a0() const { return a0_; }
  double a1() const { return a1_; }
  const FiberMap& fibers() const { return fibers_; }
  const GreenCurve& green() const { return green_; }

  /// deg(D_K) = a0 + a1.
  double degree() const { return a0_ + a1_; }
  /// sum_p c_p log p.
  double fiber_log_sum() const;
  double fiber(long long p) const;

 private:
  double a0_ = 0.0;
  double a1_ = 0.0;
  FiberMap fibers_;
  GreenCurve green_;
};

/// phi = q z^k with q = num / den.
struct PrincipalMonomial {
  long long k = 0;
  long long num = 1;
  long long den = 1;
};

/// psi = z^k prod_p p^{e_p} with real exponents (an element of Rat(X)^x tensor R).
struct RealPrincipal {
  double k = 0.0;
  FiberMap prime_exponents;
};

/// Factorisation of |n| into primes; n != 0.
std::map<long long, int> factorize(long long n);

ToricArithDivisor linear_combine(const std::vector<std::pair<double, ToricArithDivisor>>& terms);
ToricArithDivisor operator+(const ToricArithDivisor& a, const ToricArithDivisor& b);
ToricArithDivisor operator-(const ToricArithDivisor& a, const ToricArithDivisor& b);
ToricArithDivisor operator*(double k, const ToricArithDivisor& d);

/// Sum of scaled curves with identical subtrees and affine leaves folded together.
GreenCurve combine_curves(const std::vector<std::pair<double, GreenCurve>>& terms);

/// Componentwise max of coefficients, pointwise max of profiles. Throws on empty input.
ToricArithDivisor max_divisor(const std::vector<ToricArithDivisor>& divisors);

/// (q z^k)^ = (k H1 - k H0 + sum_p ord_p(q) F_p, -k t - 2 log|q|). Throws if q = 0.
ToricArithDivisor principal(const PrincipalMonomial& m);
ToricArithDivisor principal(const RealPrincipal& psi);

/// (0, lambda).
ToricArithDivisor constant_divisor(double lambda);
/// (H0, t+) and (H1, (-t)+).
ToricArithDivisor canonical_h0();
ToricArithDivisor canonical_h1();
/// (a H0 + b H1, u) with fibers empty; convenience for tests and tools.
ToricArithDivisor horizontal(double a0, double a1, GreenCurve u);

bool is_effective(const ToricArithDivisor& d, const CurveOptions& opts = {});

struct FiberNormalization {
  ToricArithDivisor fiber_free;
  /// The principal shift prod_p p^{c_p}; fiber_free = D - shift^.
  RealPrincipal shift;
};

FiberNormalization normalize_fibers(const ToricArithDivisor& d);

}  // namespace arakzar
