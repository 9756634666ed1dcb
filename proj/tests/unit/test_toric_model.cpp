#include <doctest.h>

#include <cmath>

#include "arakzar/errors.hpp"
#include "arakzar/intersection.hpp"
#include "arakzar/random_family.hpp"
#include "arakzar/toric_model.hpp"
#include "arakzar/volumes.hpp"
#include "helpers.hpp"

using namespace arakzar;
using testing::tplus;

namespace {

double profile_gap(const GreenCurve& a, const GreenCurve& b) {
  double m = 0.0;
  for (double t = -30.0; t <= 30.0; t += 0.1) m = std::max(m, std::abs(a(t) - b(t)));
  return m;
}

bool same_divisor(const ToricArithDivisor& a, const ToricArithDivisor& b, double tol = 1e-12) {
  if (std::abs(a.a0() - b.a0()) > tol || std::abs(a.a1() - b.a1()) > tol) return false;
  FiberMap keys = a.fibers();
  for (const auto& [p, c] : b.fibers()) keys[p] = c;
  for (const auto& [p, c] : keys)
    if (std::abs(a.fiber(p) - b.fiber(p)) > tol) return false;
  return profile_gap(a.green(), b.green()) <= tol;
}

ToricArithDivisor fubini_study() { return horizontal(1.0, 0.0, GreenCurve::logexp(1.0, 1.0)); }

}  // namespace

TEST_CASE("construction validates Green compatibility and prime keys") {
  CHECK_NOTHROW(ToricArithDivisor(1.0, 0.0, {}, tplus()));
  CHECK_THROWS_AS(ToricArithDivisor(2.0, 0.0, {}, tplus()), InputError);
  CHECK_THROWS_AS(ToricArithDivisor(1.0, 1.0, {}, tplus()), InputError);
  CHECK_THROWS_AS(ToricArithDivisor(1.0, 0.0, {{4, 1.0}}, tplus()), InputError);
  CHECK_THROWS_AS(ToricArithDivisor(1.0, 0.0, {{1, 1.0}}, tplus()), InputError);
  const ToricArithDivisor d(1.0, 0.0, {{3, 0.0}, {5, 2.0}}, tplus());
  CHECK(d.fibers().size() == 1);
  CHECK(d.fiber(5) == 2.0);
}

TEST_CASE("linear_combine examples") {
  const auto D = fubini_study();
  const auto E = canonical_h1();
  CHECK(same_divisor(linear_combine({{1.0, D}, {0.0, E}}), D));
  const auto zero = linear_combine({{1.0, D}, {-1.0, D}});
  CHECK(zero.a0() == 0.0);
  CHECK(zero.a1() == 0.0);
  CHECK(profile_gap(zero.green(), GreenCurve()) == 0.0);
  const auto two = 2.0 * canonical_h0();
  CHECK(two.a0() == 2.0);
  const auto as = asymptotics(two.green());
  CHECK(as.slope_minus == 0.0);
  CHECK(as.slope_plus == 2.0);
  CHECK(two.green()(3.0) == 6.0);
}

TEST_CASE("max_divisor examples") {
  const auto D = ToricArithDivisor(0.5, 0.5, {{2, 0.25}}, GreenCurve::sum({GreenCurve::logexp(1.0, 2.0), GreenCurve::affine(-0.5, 0.0)}));
  CHECK(same_divisor(max_divisor({D, D}), D));
  CHECK(same_divisor(max_divisor({canonical_h0(), ToricArithDivisor()}), canonical_h0()));
  CHECK(same_divisor(max_divisor({constant_divisor(-1.0), constant_divisor(1.0)}), constant_divisor(1.0)));
  CHECK_THROWS_AS(max_divisor({}), InputError);
}

TEST_CASE("principal examples") {
  const auto z = principal({1, 1, 1});
  CHECK(z.a1() == 1.0);
  CHECK(z.a0() == -1.0);
  CHECK(z.green()(2.5) == doctest::Approx(-2.5));
  const auto p = principal({0, 7, 1});
  CHECK(p.fiber(7) == 1.0);
  CHECK(p.a0() == 0.0);
  CHECK(p.green()(0.3) == doctest::Approx(-2.0 * std::log(7.0)));
  const auto one = principal({0, 1, 1});
  CHECK(one.fibers().empty());
  CHECK(profile_gap(one.green(), GreenCurve()) == 0.0);
  CHECK_THROWS_AS(principal({2, 0, 1}), InputError);
  const auto frac = principal({-2, 12, 5});
  CHECK(frac.fiber(2) == 2.0);
  CHECK(frac.fiber(3) == 1.0);
  CHECK(frac.fiber(5) == -1.0);
}

TEST_CASE("is_effective examples") {
  CHECK(is_effective(canonical_h0()));
  CHECK_FALSE(is_effective(constant_divisor(-1e-3)));
  // The H1 piece of the 0.8 example: (vartheta H1, n1) with n1 = u - (tangent of slope vartheta)
  // left of the contact point and 0 to the right.
  const auto [vt, th] = testing::example_roots(0.8, 0.8);
  (void)th;
  const GreenCurve u = GreenCurve::logexp(0.8, 0.8);
  const double tm = std::log(vt / (1.0 - vt));
  const double c = u(tm) - vt * tm;
  const GreenCurve n1 = GreenCurve::piecewise({tm}, {GreenCurve::sum({u, GreenCurve::affine(-vt, -c)}), GreenCurve()});
  const ToricArithDivisor N1(0.0, vt, {}, n1);
  CHECK(is_effective(N1));
  CHECK_FALSE(is_effective(N1 - constant_divisor(1e-6)));
}

TEST_CASE("normalize_fibers examples") {
  SUBCASE("single fiber") {
    const ToricArithDivisor F(0.0, 0.0, {{5, 1.0}}, GreenCurve());
    const auto n = normalize_fibers(F);
    CHECK(n.fiber_free.fibers().empty());
    CHECK(n.fiber_free.green()(1.0) == doctest::Approx(2.0 * std::log(5.0)));
    CHECK(n.shift.prime_exponents.at(5) == 1.0);
    CHECK(intersect(n.fiber_free, n.fiber_free) == doctest::Approx(intersect(F, F)).epsilon(1e-12));
    CHECK(vol(n.fiber_free) == doctest::Approx(vol(F)));
  }
  SUBCASE("fiber-free input") {
    const auto n = normalize_fibers(canonical_h0());
    CHECK(n.shift.prime_exponents.empty());
    CHECK(same_divisor(n.fiber_free, canonical_h0()));
  }
  SUBCASE("two fibers") {
    const ToricArithDivisor D(1.0, 0.0, {{2, 2.0}, {3, 3.0}}, tplus());
    const auto n = normalize_fibers(D);
    CHECK(n.fiber_free.green()(0.7) == doctest::Approx(0.7 + 4.0 * std::log(2.0) + 6.0 * std::log(3.0)));
    CHECK(n.shift.prime_exponents.at(2) == 2.0);
    CHECK(n.shift.prime_exponents.at(3) == 3.0);
    CHECK(same_divisor(n.fiber_free + principal(n.shift), D, 1e-12));
  }
}

TEST_CASE("property: principal divisors pair to zero") {
  const auto fam = positive_degree_family(5, 24);
  for (const PrincipalMonomial& m : {PrincipalMonomial{1, 1, 1}, PrincipalMonomial{-3, 6, 35}, PrincipalMonomial{2, -4, 9}}) {
    for (const auto& rc : fam) CHECK(std::abs(intersect(principal(m), rc.divisor)) < 1e-9);
  }
}

TEST_CASE("property: max_divisor is the least upper bound") {
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    const auto A = ToricArithDivisor(1.0, 0.0, {{2, uniform(rng, -1, 1)}}, GreenCurve::sum({random_convex_profile(rng, 1.0, 0.0), random_bump(rng)}));
    const double b1 = uniform(rng, -0.5, 0.5);
    const auto B = ToricArithDivisor(1.0 - b1, b1, {{3, uniform(rng, -1, 1)}}, random_convex_profile(rng, 1.0 - b1, b1));
    const auto M = max_divisor({A, B});
    for (const auto* X : {&A, &B}) {
      CHECK(M.a0() >= X->a0());
      CHECK(M.a1() >= X->a1());
      CHECK(M.fiber(2) >= X->fiber(2));
      CHECK(M.fiber(3) >= X->fiber(3));
      CHECK(sup_difference(X->green(), M.green()) <= 1e-12);
    }
    // Least: every coefficient and every profile value is attained by an input.
    CHECK(M.a0() == std::max(A.a0(), B.a0()));
    for (double t = -10.0; t <= 10.0; t += 0.5) CHECK(M.green()(t) == std::max(A.green()(t), B.green()(t)));
  }
}

TEST_CASE("property: normalize_fibers preserves effectivity up to the principal shift") {
  Rng rng(22);
  for (int i = 0; i < 20; ++i) {
    const ToricArithDivisor D(0.5, 0.5, {{2, uniform(rng, -1, 1)}, {5, uniform(rng, -1, 1)}},
                              GreenCurve::sum({random_convex_profile(rng, 0.5, 0.5), GreenCurve::affine(0.0, uniform(rng, -1, 3))}));
    const auto n = normalize_fibers(D);
    for (const PrincipalMonomial& m : {PrincipalMonomial{0, 1, 1}, PrincipalMonomial{0, 10, 1}, PrincipalMonomial{0, 1, 10}}) {
      RealPrincipal composed = n.shift;
      for (const auto& [p, e] : factorize(m.num)) composed.prime_exponents[p] += e;
      for (const auto& [p, e] : factorize(m.den)) composed.prime_exponents[p] -= e;
      CHECK(is_effective(D + principal(m)) == is_effective(n.fiber_free + principal(composed)));
    }
  }
}

TEST_CASE("property: linear_combine is associative and commutative") {
  const auto fam = positive_degree_family(6, 12);
  for (std::size_t i = 0; i + 2 < fam.size(); i += 3) {
    const auto& A = fam[i].divisor;
    const auto& B = fam[i + 1].divisor;
    const auto& C = fam[i + 2].divisor;
    const auto left = (A + B) + C;
    const auto right = A + (B + C);
    const auto swapped = C + (B + A);
    CHECK(same_divisor(left, right, 1e-12));
    CHECK(same_divisor(left, swapped, 1e-12));
    CHECK(same_divisor(linear_combine({{0.5, A}, {2.0, B}}), linear_combine({{2.0, B}, {0.5, A}}), 1e-12));
  }
}
