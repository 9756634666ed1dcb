#pragma once

// Vertical Zariski decomposition on one fiber over a prime p. Degrees are in
// units of log p, so M is the (rational) intersection matrix of the components.

#include <string>
#include <vector>

#include <Eigen/Core>

namespace arakzar {

struct FiberConfiguration {
  /// M(i, j) = deg(C_i . C_j) / log p.
  Eigen::MatrixXd M;
  /// Multiplicities of the components in the fiber.
  Eigen::VectorXd mult;
  long long p = 2;

  int r() const { return static_cast<int>(M.rows()); }
  double logp() const;
};

struct VerticalDivisorData {
  /// Coefficients of D on C_1..C_r.
  Eigen::VectorXd v;
  /// Degrees of the non-vertical part of D on each C_i.
  Eigen::VectorXd e;
};

struct ValidationReport {
  bool ok = false;
  std::string diagnostic;
  double max_eigenvalue = 0.0;
  int kernel_dim = 0;
};

/// Zariski's lemma: M symmetric, off-diagonal >= 0, negative semidefinite with kernel span(mult).
ValidationReport validate(const FiberConfiguration& cfg, double tol = 1e-9);

struct PiNefResult {
  Eigen::VectorXd q;
  Eigen::VectorXd n;
  /// s = e + M q, the degrees of Q on the components.
  Eigen::VectorXd slack;
  int iterations = 0;
  /// Active sets after each iteration (for the monotonicity property).
  std::vector<std::vector<int>> active_history;
};

/// Greatest pi-nef Q <= D and N = D - Q. Throws InputError if the configuration is
/// invalid or e . mult < 0.
PiNefResult greatest_pi_nef(const FiberConfiguration& cfg, const VerticalDivisorData& data);

/// Effective E supported on `subset` with (M E)_i = -targets_i on the subset
/// and (M E)_j >= 0 elsewhere. Throws InputError for the full fiber or negative targets.
Eigen::VectorXd nef_perp(const FiberConfiguration& cfg, const std::vector<int>& subset, const Eigen::VectorXd& targets);

/// True iff e + M v >= -tol componentwise.
bool is_pi_nef(const FiberConfiguration& cfg, const Eigen::VectorXd& v, const Eigen::VectorXd& e, double tol = 1e-12);

}  // namespace arakzar
