#include "arakzar/random_family.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "arakzar/volumes.hpp"

namespace arakzar {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

GreenCurve tent(double height, double center, double width) {
  // height * max(0, 1 - |t - center| / width)
  const GreenCurve up = GreenCurve::affine(1.0 / width, 1.0 - center / width);
  const GreenCurve down = GreenCurve::affine(-1.0 / width, 1.0 + center / width);
  const GreenCurve shape = GreenCurve::max({GreenCurve::affine(0.0, 0.0), GreenCurve::min({up, down})});
  return GreenCurve::scale(height, shape);
}

GreenCurve sigmoid_step(double height, double c1, double c2) {
  // height * (log(1 + e^{t - c1}) - log(1 + e^{t - c2})): 0 at -inf, height (c2 - c1) at +inf.
  return GreenCurve::scale(height, GreenCurve::sum({GreenCurve::logexp(1.0, std::exp(-c1)),
                                                    GreenCurve::scale(-1.0, GreenCurve::logexp(1.0, std::exp(-c2)))}));
}

FiberMap random_fibers(Rng& rng) {
  FiberMap out;
  if (uniform(rng, 0.0, 1.0) >= 0.4) return out;
  static constexpr long long kPrimes[] = {2, 3, 5, 7};
  const int n = uniform_int(rng, 1, 2);
  for (int i = 0; i < n; ++i) out[kPrimes[uniform_int(rng, 0, 3)]] = uniform(rng, -1.0, 1.0);
  return out;
}

GreenCurve with_constant(const GreenCurve& u, double lambda) {
  return combine_curves({{1.0, u}, {1.0, GreenCurve::affine(0.0, lambda)}});
}

}  // namespace

GreenCurve random_convex_profile(Rng& rng, double a0, double a1) {
  const double d = a0 + a1;
  const int kind = uniform_int(rng, 0, 2);
  if (kind == 0 || d <= 0.0) {
    if (d <= 0.0) return GreenCurve::affine(a0, uniform(rng, -1.0, 1.0));
    return GreenCurve::sum({GreenCurve::scale(d, GreenCurve::logexp(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.2, 5.0))),
                            GreenCurve::affine(-a1, 0.0)});
  }
  if (kind == 1) {
    // Max of lines with slopes -a1 < s_1 < ... < a0 through a convex chain of kinks.
    const int inner = uniform_int(rng, 1, 3);
    std::vector<double> slopes = {-a1};
    for (int i = 0; i < inner; ++i) slopes.push_back(uniform(rng, -a1, a0));
    slopes.push_back(a0);
    std::sort(slopes.begin(), slopes.end());
    std::vector<double> kinks;
    for (int i = 0; i + 1 < static_cast<int>(slopes.size()); ++i) kinks.push_back(uniform(rng, -3.0, 3.0));
    std::sort(kinks.begin(), kinks.end());
    std::vector<GreenCurve> lines;
    double c = uniform(rng, -0.5, 0.5);
    lines.push_back(GreenCurve::affine(slopes[0], c));
    for (std::size_t i = 1; i < slopes.size(); ++i) {
      // Continue the chain: the new line meets the previous one at kinks[i-1].
      c += (slopes[i - 1] - slopes[i]) * kinks[i - 1];
      lines.push_back(GreenCurve::affine(slopes[i], c));
    }
    return GreenCurve::max(std::move(lines));
  }
  const double w = uniform(rng, 0.2, 0.8) * d;
  return GreenCurve::sum({GreenCurve::scale(w, GreenCurve::logexp(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.2, 5.0))),
                          GreenCurve::scale(d - w, GreenCurve::logexp(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.2, 5.0))),
                          GreenCurve::affine(-a1, 0.0)});
}

GreenCurve random_bump(Rng& rng) {
  if (uniform(rng, 0.0, 1.0) < 0.6)
    return tent(uniform(rng, 0.3, 1.0), uniform(rng, -2.0, 2.0), uniform(rng, 0.5, 2.0));
  const double c1 = uniform(rng, -2.0, 1.0);
  const double c2 = c1 + uniform(rng, 0.5, 2.0);
  // Step up then back down: bounded with zero net slope change.
  const double h = uniform(rng, 0.4, 1.2);
  return GreenCurve::sum({sigmoid_step(h, c1, c2), sigmoid_step(-h, c2, c2 + (c2 - c1))});
}

GreenCurve random_nonconvex_profile(Rng& rng) {
  while (true) {
    const double a1 = uniform(rng, -0.5, 1.5);
    const double a0 = uniform(rng, 0.3, 2.0) - a1;
    const GreenCurve u = combine_curves({{1.0, random_convex_profile(rng, a0, a1)}, {1.0, random_bump(rng)}});
    const GreenCurve q = convex_envelope(u);
    if (sup_difference(u, q) >= 0.01) return u;
  }
}

std::vector<RandomCase> positive_degree_family(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<RandomCase> out;
  static const char* kCategories[] = {"nef", "psef", "not_psef", "nonconvex"};
  while (static_cast<int>(out.size()) < count) {
    const int cat = static_cast<int>(out.size() % 4);
    const double a1 = uniform(rng, -0.5, 1.5);
    const double a0 = uniform(rng, 0.3, 2.0) - a1;
    GreenCurve u = random_convex_profile(rng, a0, a1);
    if (cat == 3) u = combine_curves({{1.0, u}, {1.0, random_bump(rng)}});
    const FiberMap fibers = random_fibers(rng);
    const ToricArithDivisor base(a0, a1, fibers, u);
    const OkounkovData ok(base);
    const double g_end = std::min(ok.G(ok.delta().lo), ok.G(ok.delta().hi));
    const double g_top = ok.g_max();
    // Adding lambda to u shifts G by lambda / 2.
    double target_shift = 0.0;
    if (cat == 0) {
      target_shift = uniform(rng, 0.05, 0.5) - g_end;
    } else if (cat == 1) {
      const double spread = g_top - g_end;
      if (spread < 0.12) continue;
      const double top = uniform(rng, 0.05, std::min(0.5, spread - 0.05));
      target_shift = top - g_top;
    } else if (cat == 2) {
      target_shift = -uniform(rng, 0.05, 0.5) - g_top;
    } else {
      if (sup_difference(u, convex_envelope(u)) < 0.01) continue;
      double top = uniform(rng, -0.3, 0.6);
      if (std::abs(top) < 0.02) top = 0.3;
      target_shift = top - g_top;
    }
    ToricArithDivisor d(a0, a1, fibers, with_constant(u, 2.0 * target_shift));
    out.push_back({std::move(d), kCategories[cat]});
  }
  return out;
}

std::vector<RandomCase> degree_zero_family(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<RandomCase> out;
  for (int i = 0; i < count; ++i) {
    const double a = uniform(rng, -1.5, 1.5);
    const double lambda = uniform(rng, -1.0, 1.0);
    const FiberMap fibers = random_fibers(rng);
    const bool flat = i % 4 == 0;
    GreenCurve u = GreenCurve::affine(a, lambda);
    if (!flat) {
      u = combine_curves({{1.0, u}, {1.0, random_bump(rng)}});
      if (uniform(rng, 0.0, 1.0) < 0.3) u = combine_curves({{1.0, u}, {1.0, random_bump(rng)}});
    }
    out.push_back({ToricArithDivisor(a, -a, fibers, u), flat ? "degree_zero_flat" : "degree_zero"});
  }
  return out;
}

FiberConfiguration random_fiber_configuration(Rng& rng, int r) {
  FiberConfiguration cfg;
  cfg.M = Eigen::MatrixXd::Zero(r, r);
  cfg.mult.resize(r);
  for (int i = 0; i < r; ++i) cfg.mult(i) = uniform_int(rng, 1, 3);
  for (int i = 1; i < r; ++i) {
    const int j = uniform_int(rng, 0, i - 1);
    const double w = uniform_int(rng, 1, 3);
    cfg.M(i, j) = cfg.M(j, i) = w;
  }
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (cfg.M(i, j) == 0.0 && uniform(rng, 0.0, 1.0) < 0.3) cfg.M(i, j) = cfg.M(j, i) = uniform_int(rng, 1, 2);
  for (int i = 0; i < r; ++i) {
    double s = 0.0;
    for (int j = 0; j < r; ++j)
      if (j != i) s += cfg.M(i, j) * cfg.mult(j);
    cfg.M(i, i) = -s / cfg.mult(i);
  }
  if (r == 1) cfg.M(0, 0) = 0.0;
  cfg.p = 2;
  return cfg;
}

VerticalDivisorData random_vertical_data(Rng& rng, const FiberConfiguration& cfg) {
  const int r = cfg.r();
  VerticalDivisorData data;
  data.v.resize(r);
  data.e.resize(r);
  for (int i = 0; i < r; ++i) {
    data.v(i) = uniform(rng, -2.0, 2.0);
    data.e(i) = uniform(rng, -1.0, 3.0);
  }
  const double total = data.e.dot(cfg.mult);
  if (total < 0.0) data.e(0) += (-total + uniform(rng, 0.0, 1.0)) / cfg.mult(0);
  return data;
}

int thread_count() {
  if (const char* env = std::getenv("ARAKZAR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& f) {
  const int threads = std::min(thread_count(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace arakzar
