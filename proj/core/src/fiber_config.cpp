#include "arakzar/fiber_config.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "arakzar/errors.hpp"

namespace arakzar {

double FiberConfiguration::logp() const { return std::log(static_cast<double>(p)); }

ValidationReport validate(const FiberConfiguration& cfg, double tol) {
  ValidationReport rep;
  const Eigen::Index r = cfg.M.rows();
  auto fail = [&rep](const std::string& why) {
    rep.ok = false;
    rep.diagnostic = why;
    return rep;
  };
  if (r < 1 || cfg.M.cols() != r) return fail("M must be a nonempty square matrix");
  if (cfg.mult.size() != r) return fail("mult must have one entry per component");
  for (Eigen::Index i = 0; i < r; ++i) {
    const double m = cfg.mult(i);
    if (!(m > 0.0) || std::abs(m - std::round(m)) > 1e-12) return fail("multiplicities must be positive integers");
  }
  if (!cfg.M.allFinite()) return fail("M has non-finite entries");
  const double scale = std::max(1.0, cfg.M.cwiseAbs().maxCoeff());
  if ((cfg.M - cfg.M.transpose()).cwiseAbs().maxCoeff() > tol * scale) return fail("M is not symmetric");
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      if (i != j && cfg.M(i, j) < -tol * scale) return fail("off-diagonal entries of M must be >= 0");
  const Eigen::MatrixXd sym = 0.5 * (cfg.M + cfg.M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  rep.max_eigenvalue = es.eigenvalues().maxCoeff();
  for (Eigen::Index i = 0; i < r; ++i)
    if (std::abs(es.eigenvalues()(i)) <= tol * scale) ++rep.kernel_dim;
  if (rep.max_eigenvalue > tol * scale) return fail("M is not negative semidefinite");
  const double residual = (cfg.M * cfg.mult).cwiseAbs().maxCoeff();
  if (residual > tol * scale * std::max(1.0, cfg.mult.cwiseAbs().maxCoeff()))
    return fail("M * mult != 0: the fiber is not in the kernel");
  if (rep.kernel_dim != 1) return fail("kernel of M is not one-dimensional");
  rep.ok = true;
  return rep;
}

bool is_pi_nef(const FiberConfiguration& cfg, const Eigen::VectorXd& v, const Eigen::VectorXd& e, double tol) {
  return ((e + cfg.M * v).array() >= -tol).all();
}

namespace {

Eigen::MatrixXd principal_block(const Eigen::MatrixXd& m, const std::vector<int>& s) {
  const auto k = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = m(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
  return out;
}

// Solves (-M_SS) x = rhs; -M_SS is positive definite for a proper subset S.
Eigen::VectorXd solve_negated_block(const FiberConfiguration& cfg, const std::vector<int>& s, const Eigen::VectorXd& rhs) {
  const Eigen::MatrixXd block = -principal_block(cfg.M, s);
  Eigen::LLT<Eigen::MatrixXd> llt(block);
  if (llt.info() != Eigen::Success) throw PropertyViolation("principal block of -M is not positive definite");
  return llt.solve(rhs);
}

void check_config(const FiberConfiguration& cfg) {
  const auto rep = validate(cfg);
  if (!rep.ok) throw InputError("invalid fiber configuration: " + rep.diagnostic);
}

}  // namespace

PiNefResult greatest_pi_nef(const FiberConfiguration& cfg, const VerticalDivisorData& data) {
  check_config(cfg);
  const int r = cfg.r();
  if (data.v.size() != r || data.e.size() != r) throw InputError("v and e must have one entry per component");
  const double scale = 1.0 + data.e.cwiseAbs().maxCoeff() + cfg.M.cwiseAbs().maxCoeff() * data.v.cwiseAbs().maxCoeff();
  if (data.e.dot(cfg.mult) < -1e-12 * scale)
    throw InputError("total degree e . mult must be >= 0 (deg(D_K) >= 0)");
  const double eps = 1e-14 * scale;

  PiNefResult out;
  const Eigen::VectorXd base = data.e + cfg.M * data.v;
  std::vector<int> active;
  std::vector<bool> in(static_cast<std::size_t>(r), false);
  out.n = Eigen::VectorXd::Zero(r);
  while (true) {
    out.n.setZero();
    if (!active.empty()) {
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(active.size()));
      for (std::size_t i = 0; i < active.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = -base(active[i]);
      // M_SS n_S = base_S  <=>  (-M_SS) n_S = -base_S
      const Eigen::VectorXd ns = solve_negated_block(cfg, active, rhs);
      for (std::size_t i = 0; i < active.size(); ++i) out.n(active[i]) = ns(static_cast<Eigen::Index>(i));
    }
    out.q = data.v - out.n;
    out.slack = data.e + cfg.M * out.q;
    std::vector<int> strict;
    std::vector<int> ties;
    for (int i = 0; i < r; ++i) {
      if (in[static_cast<std::size_t>(i)]) continue;
      if (out.slack(i) < -eps) strict.push_back(i);
      else if (out.slack(i) <= eps) ties.push_back(i);
    }
    if (strict.empty()) break;
    if (active.size() + strict.size() + ties.size() == static_cast<std::size_t>(r)) ties.clear();
    if (active.size() + strict.size() == static_cast<std::size_t>(r))
      throw PropertyViolation("active set reached the whole fiber; Zariski's lemma violated");
    for (int i : strict) in[static_cast<std::size_t>(i)] = true;
    for (int i : ties) in[static_cast<std::size_t>(i)] = true;
    active.clear();
    for (int i = 0; i < r; ++i)
      if (in[static_cast<std::size_t>(i)]) active.push_back(i);
    out.active_history.push_back(active);
    if (++out.iterations > r) throw PropertyViolation("active-set iteration did not terminate within r steps");
  }
  return out;
}

Eigen::VectorXd nef_perp(const FiberConfiguration& cfg, const std::vector<int>& subset, const Eigen::VectorXd& targets) {
  check_config(cfg);
  const int r = cfg.r();
  if (targets.size() != static_cast<Eigen::Index>(subset.size())) throw InputError("one target per subset index");
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InputError("subset has repeated indices");
  for (int i : s)
    if (i < 0 || i >= r) throw InputError("subset index out of range");
  if (static_cast<int>(s.size()) == r) throw InputError("subset covers the whole fiber");
  for (Eigen::Index i = 0; i < targets.size(); ++i)
    if (targets(i) < 0.0) throw InputError("targets must be >= 0");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(r);
  if (s.empty()) return e;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto pos = std::find(subset.begin(), subset.end(), s[i]) - subset.begin();
    rhs(static_cast<Eigen::Index>(i)) = targets(pos);
  }
  const Eigen::VectorXd sol = solve_negated_block(cfg, s, rhs);
  for (std::size_t i = 0; i < s.size(); ++i) e(s[i]) = sol(static_cast<Eigen::Index>(i));
  return e;
}

}  // namespace arakzar
