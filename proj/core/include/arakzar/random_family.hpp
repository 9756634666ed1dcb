#pragma once

// Seeded generators for the verification harness, plus a small parallel map.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "arakzar/fiber_config.hpp"
#include "arakzar/toric_model.hpp"

namespace arakzar {

using Rng = std::mt19937_64;

struct RandomCase {
  ToricArithDivisor divisor;
  /// "nef", "psef", "not_psef", "nonconvex", "degree_zero", "degree_zero_flat".
  std::string category;
};

/// Integrable divisors with deg(D_K) > 0, cycling through the four categories.
/// The constant term is tuned so that predicates hold with margin >= 0.02.
std::vector<RandomCase> positive_degree_family(std::uint64_t seed, int count);

/// deg(D_K) = 0: (a H0 - a H1 + fibers, a t + lambda + bump); a quarter have no bump.
std::vector<RandomCase> degree_zero_family(std::uint64_t seed, int count);

/// Convex profile with slopes -a1 at -inf and a0 at +inf.
GreenCurve random_convex_profile(Rng& rng, double a0, double a1);
/// Bounded, compactly varying, non-convex perturbation (tents and sigmoid steps).
GreenCurve random_bump(Rng& rng);
/// Convex profile plus bumps; convexity fails by at least 0.01 in sup norm.
GreenCurve random_nonconvex_profile(Rng& rng);

/// Connected fiber with integer weights and multiplicities, M mult = 0.
FiberConfiguration random_fiber_configuration(Rng& rng, int r);
/// v in [-2, 2]^r, e in [-1, 3]^r, with e . mult shifted to be nonnegative.
VerticalDivisorData random_vertical_data(Rng& rng, const FiberConfiguration& cfg);

double uniform(Rng& rng, double lo, double hi);

/// ARAKZAR_THREADS if set and positive, else std::thread::hardware_concurrency().
int thread_count();

/// Runs f(0..n-1) on up to thread_count() threads. The first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace arakzar
