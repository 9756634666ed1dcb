#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "arakzar/errors.hpp"
#include "arakzar/fiber_config.hpp"
#include "arakzar/random_family.hpp"

using namespace arakzar;

namespace {

FiberConfiguration i2() {
  FiberConfiguration c;
  c.M = Eigen::MatrixXd(2, 2);
  c.M << -2, 2, 2, -2;
  c.mult = Eigen::VectorXd::Ones(2);
  return c;
}

FiberConfiguration cycle3() {
  FiberConfiguration c;
  c.M = Eigen::MatrixXd(3, 3);
  c.M << -2, 1, 1, 1, -2, 1, 1, 1, -2;
  c.mult = Eigen::VectorXd::Ones(3);
  return c;
}

VerticalDivisorData data(std::initializer_list<double> v, std::initializer_list<double> e) {
  VerticalDivisorData d;
  d.v = Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
  d.e = Eigen::Map<const Eigen::VectorXd>(e.begin(), static_cast<Eigen::Index>(e.size()));
  return d;
}

/// Componentwise max of all pi-nef q' = v - n' with n' on a grid of step h in [0, R]^r.
Eigen::VectorXd brute_force_greatest(const FiberConfiguration& cfg, const VerticalDivisorData& d, double R, double h) {
  const int r = cfg.r();
  const int steps = static_cast<int>(std::ceil(R / h));
  Eigen::VectorXd best = Eigen::VectorXd::Constant(r, -1e300);
  std::vector<int> idx(r, 0);
  Eigen::VectorXd q(r);
  bool any = false;
  while (true) {
    for (int i = 0; i < r; ++i) q(i) = d.v(i) - idx[i] * h;
    const Eigen::VectorXd s = d.e + cfg.M * q;
    if (s.minCoeff() >= -1e-12) {
      best = best.cwiseMax(q);
      any = true;
    }
    int k = 0;
    while (k < r && idx[k] == steps) idx[k++] = 0;
    if (k == r) break;
    ++idx[k];
  }
  REQUIRE(any);
  return best;
}

}  // namespace

TEST_CASE("validate examples") {
  CHECK(validate(i2()).ok);
  CHECK(validate(cycle3()).ok);
  const auto v3 = validate(cycle3());
  CHECK(v3.kernel_dim == 1);
  CHECK(std::abs(v3.max_eigenvalue) < 1e-9);

  FiberConfiguration bad;
  bad.M = Eigen::MatrixXd::Constant(1, 1, -1.0);
  bad.mult = Eigen::VectorXd::Ones(1);
  CHECK_FALSE(validate(bad).ok);

  FiberConfiguration smooth;
  smooth.M = Eigen::MatrixXd::Zero(1, 1);
  smooth.mult = Eigen::VectorXd::Ones(1);
  CHECK(validate(smooth).ok);

  FiberConfiguration split;
  split.M = Eigen::MatrixXd::Zero(2, 2);
  split.mult = Eigen::VectorXd::Ones(2);
  CHECK_FALSE(validate(split).ok);

  FiberConfiguration negative_off = i2();
  negative_off.M << 2, -2, -2, 2;
  CHECK_FALSE(validate(negative_off).ok);

  FiberConfiguration asym = cycle3();
  asym.M(0, 1) = 2;
  CHECK_FALSE(validate(asym).ok);
  CHECK_FALSE(validate(asym).diagnostic.empty());

  FiberConfiguration wrong_mult = i2();
  wrong_mult.mult << 1, 2;
  CHECK_FALSE(validate(wrong_mult).ok);
}

TEST_CASE("greatest_pi_nef examples") {
  SUBCASE("I2, v = (1, 0), e = (0, 3)") {
    const auto r = greatest_pi_nef(i2(), data({1, 0}, {0, 3}));
    CHECK(std::abs(r.q(0)) < 1e-12);
    CHECK(std::abs(r.q(1)) < 1e-12);
    CHECK(r.n(0) == doctest::Approx(1.0));
    CHECK(std::abs(r.n(1)) < 1e-12);
    CHECK(std::abs(r.slack(0)) < 1e-12);
    CHECK(r.slack(1) == doctest::Approx(3.0));
  }
  SUBCASE("I2, v = (1, 0.5), e = (0, 3)") {
    // s(v) = (-1, 4); active set {1}: -2 delta = -1, so n = (0.5, 0) and s = (0, 3).
    const auto r = greatest_pi_nef(i2(), data({1, 0.5}, {0, 3}));
    CHECK(r.q(0) == doctest::Approx(0.5));
    CHECK(r.q(1) == doctest::Approx(0.5));
    CHECK(r.n(0) == doctest::Approx(0.5));
    CHECK(std::abs(r.n(1)) < 1e-12);
    CHECK(std::abs(r.slack(0)) < 1e-12);
    CHECK(r.slack(1) == doctest::Approx(3.0));
    CHECK(r.iterations == 1);
  }
  SUBCASE("already pi-nef") {
    const auto r = greatest_pi_nef(cycle3(), data({0.3, 0.1, -0.2}, {5, 5, 5}));
    CHECK(r.n.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.q.isApprox(Eigen::Vector3d(0.3, 0.1, -0.2).eval()));
    CHECK(r.iterations == 0);
  }
  SUBCASE("3-cycle with two negative components") {
    const auto r = greatest_pi_nef(cycle3(), data({1, 1, 0}, {-0.5, 0, 1}));
    CHECK(r.slack.minCoeff() >= -1e-12);
    CHECK(std::abs(r.n.dot(r.slack)) <= 1e-12);
    CHECK(r.n.minCoeff() >= 0.0);
    CHECK(std::abs(r.n(2)) < 1e-12);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(greatest_pi_nef(i2(), data({0, 0}, {-1, 0})), InputError);
    FiberConfiguration bad = i2();
    bad.M << -1, 2, 2, -2;
    CHECK_THROWS_AS(greatest_pi_nef(bad, data({0, 0}, {1, 1})), InputError);
    CHECK_THROWS_AS(greatest_pi_nef(i2(), data({0, 0, 0}, {1, 1, 1})), InputError);
  }
}

TEST_CASE("nef_perp examples") {
  const Eigen::VectorXd E = nef_perp(i2(), {0}, Eigen::VectorXd::Constant(1, 0.8));
  CHECK(E(0) == doctest::Approx(0.4));
  CHECK(std::abs(E(1)) < 1e-15);
  const Eigen::VectorXd ME = i2().M * E;
  CHECK(ME(0) == doctest::Approx(-0.8));
  CHECK(ME(1) == doctest::Approx(0.8));
  CHECK(nef_perp(i2(), {}, Eigen::VectorXd()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(nef_perp(i2(), {0, 1}, Eigen::VectorXd::Ones(2)), InputError);
  CHECK_THROWS_AS(nef_perp(i2(), {0}, Eigen::VectorXd::Constant(1, -1.0)), InputError);
}

TEST_CASE("is_pi_nef") {
  CHECK(is_pi_nef(i2(), Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 3)));
  CHECK_FALSE(is_pi_nef(i2(), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 3)));
  // Multiples of the whole fiber do not change degrees.
  CHECK(is_pi_nef(i2(), Eigen::Vector2d(7, 7), Eigen::Vector2d(0, 3)));
}

TEST_CASE("property: LCP post-conditions and monotone active sets") {
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 6);
    const auto cfg = random_fiber_configuration(rng, r);
    REQUIRE(validate(cfg).ok);
    const auto d = random_vertical_data(rng, cfg);
    const auto res = greatest_pi_nef(cfg, d);
    CHECK(res.slack.minCoeff() >= -1e-12);
    CHECK(std::abs(res.n.dot(res.slack)) <= 1e-10);
    CHECK(res.n.minCoeff() >= -1e-12);
    CHECK((res.n.array() / cfg.mult.array()).minCoeff() <= 1e-12);
    CHECK((res.q + res.n - d.v).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((d.e + cfg.M * res.q - res.slack).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(res.iterations <= r);
    for (std::size_t k = 1; k < res.active_history.size(); ++k) {
      const auto& prev = res.active_history[k - 1];
      const auto& cur = res.active_history[k];
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    }
  }
}

TEST_CASE("property: the solver dominates every brute-force pi-nef minorant") {
  Rng rng(62);
  int tested = 0;
  while (tested < 12) {
    const int r = 2 + static_cast<int>(rng() % 2);
    const auto cfg = random_fiber_configuration(rng, r);
    const auto d = random_vertical_data(rng, cfg);
    const auto res = greatest_pi_nef(cfg, d);
    const double R = res.n.maxCoeff() + 0.1;
    if (std::pow(R / 1e-2, r) > 4e6) continue;
    const Eigen::VectorXd top = brute_force_greatest(cfg, d, R, 1e-2);
    CHECK((top - res.q).maxCoeff() <= 1e-12);
    CHECK((res.q - top).cwiseAbs().maxCoeff() <= 2e-2);
    ++tested;
  }
  // I2 and the 3-cycle.
  for (const auto& [cfg, d] : {std::pair{i2(), data({1, 0.5}, {0, 3})}, std::pair{cycle3(), data({1, 1, 0}, {-0.5, 0, 1})}}) {
    const auto res = greatest_pi_nef(cfg, d);
    const Eigen::VectorXd top = brute_force_greatest(cfg, d, res.n.maxCoeff() + 0.1, 1e-2);
    CHECK((top - res.q).maxCoeff() <= 1e-12);
    CHECK((res.q - top).cwiseAbs().maxCoeff() <= 2e-2);
  }
}

TEST_CASE("property: Zariski negativity below N") {
  Rng rng(63);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 2 + static_cast<int>(rng() % 5);
    const auto cfg = random_fiber_configuration(rng, r);
    const auto d = random_vertical_data(rng, cfg);
    const auto res = greatest_pi_nef(cfg, d);
    if (res.n.maxCoeff() <= 1e-9) continue;
    Eigen::VectorXd np = res.n;
    for (int i = 0; i < r; ++i) np(i) *= uniform(rng, 0.0, 1.0);
    // Keep a component with n_j = 0 so np is never a multiple of the fiber.
    Eigen::Index j;
    (res.n.array() / cfg.mult.array()).minCoeff(&j);
    np(j) = 0.0;
    if (np.maxCoeff() <= 1e-9) continue;
    CHECK(np.dot(cfg.M * np) < 0.0);
    ++tested;
  }
  CHECK(tested > 50);
}

TEST_CASE("property: scale equivariance") {
  Rng rng(64);
  for (int trial = 0; trial < 50; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 6);
    const auto cfg = random_fiber_configuration(rng, r);
    const auto d = random_vertical_data(rng, cfg);
    const auto base = greatest_pi_nef(cfg, d);
    for (double c : {0.25, 3.0}) {
      VerticalDivisorData scaled{c * d.v, c * d.e};
      const auto res = greatest_pi_nef(cfg, scaled);
      CHECK((res.q - c * base.q).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + c * base.q.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("property: nef_perp cancels the targets") {
  Rng rng(65);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = 2 + static_cast<int>(rng() % 5);
    const auto cfg = random_fiber_configuration(rng, r);
    std::vector<int> subset;
    for (int i = 0; i < r; ++i)
      if (uniform(rng, 0.0, 1.0) < 0.5) subset.push_back(i);
    if (static_cast<int>(subset.size()) == r) subset.pop_back();
    Eigen::VectorXd t(static_cast<Eigen::Index>(subset.size()));
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = uniform(rng, 0.0, 2.0);
    const Eigen::VectorXd E = nef_perp(cfg, subset, t);
    const Eigen::VectorXd ME = cfg.M * E;
    CHECK(E.minCoeff() >= -1e-12);
    for (int i = 0; i < r; ++i) {
      const auto it = std::find(subset.begin(), subset.end(), i);
      if (it != subset.end()) CHECK(std::abs(ME(i) + t(it - subset.begin())) <= 1e-9);
      else CHECK(ME(i) >= -1e-9);
    }
  }
}
