#include <benchmark/benchmark.h>

#include "arakzar/fiber_config.hpp"
#include "arakzar/intersection.hpp"
#include "arakzar/positivity_zariski.hpp"
#include "arakzar/random_family.hpp"
#include "arakzar/volumes.hpp"

using namespace arakzar;

namespace {

ToricArithDivisor example(double a) { return horizontal(1.0, 0.0, GreenCurve::logexp(a, a)); }

void BM_ConvexEnvelope(benchmark::State& state) {
  Rng rng(1);
  const GreenCurve u = random_nonconvex_profile(rng);
  for (auto _ : state) benchmark::DoNotOptimize(convex_envelope(u));
}
BENCHMARK(BM_ConvexEnvelope);

void BM_Intersect(benchmark::State& state) {
  const auto fam = positive_degree_family(3, 8);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = fam[i % fam.size()].divisor;
    const auto& b = fam[(i + 1) % fam.size()].divisor;
    benchmark::DoNotOptimize(intersect(a, b));
    ++i;
  }
}
BENCHMARK(BM_Intersect);

void BM_Volume(benchmark::State& state) {
  const auto D = example(0.8);
  for (auto _ : state) benchmark::DoNotOptimize(vol(D));
}
BENCHMARK(BM_Volume);

void BM_Zariski(benchmark::State& state) {
  const auto D = example(0.8);
  for (auto _ : state) benchmark::DoNotOptimize(zariski(D));
}
BENCHMARK(BM_Zariski);

void BM_CountSectionsUpper(benchmark::State& state) {
  const auto D = example(1.0);
  const OkounkovData ok(D);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_sections(D, ok, m, CountOptions{0, {}}));
}
BENCHMARK(BM_CountSectionsUpper)->Arg(25)->Arg(100)->Arg(400);

void BM_CountSectionsExact(benchmark::State& state) {
  const auto D = example(1.0);
  const OkounkovData ok(D);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_sections(D, ok, m, CountOptions{1000000, {}}));
}
BENCHMARK(BM_CountSectionsExact)->Arg(1)->Arg(2)->Arg(3);

void BM_GreatestPiNef(benchmark::State& state) {
  Rng rng(5);
  const int r = static_cast<int>(state.range(0));
  const auto cfg = random_fiber_configuration(rng, r);
  const auto d = random_vertical_data(rng, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(greatest_pi_nef(cfg, d));
}
BENCHMARK(BM_GreatestPiNef)->Arg(2)->Arg(6)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
