#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arakzar/intersection.hpp"
#include "arakzar/volumes.hpp"

namespace arakzar {

struct PositivityOptions {
  CurveOptions curve;
  PairingOptions pairing;
  /// Equality tolerance for deg^2 versus volumes.
  double equality_tol = 1e-6;
  /// Strictness margin (deg(N^2) < -margin).
  double strict_margin = 1e-9;
};

bool is_integrable(const ToricArithDivisor& d);
bool is_relatively_nef(const ToricArithDivisor& d, const CurveOptions& opts = {});
bool is_pseudo_effective(const ToricArithDivisor& d, const CurveOptions& opts = {});
bool is_pseudo_effective(const ToricArithDivisor& d, const OkounkovData& ok);
/// Convex profile, deg(D_K) >= 0 and G >= -tol at both ends of Delta. Also checks
/// heights at a few torus points and throws PropertyViolation on disagreement.
bool is_nef(const ToricArithDivisor& d, const CurveOptions& opts = {});
bool is_nef(const ToricArithDivisor& d, const OkounkovData& ok, const CurveOptions& opts);
bool is_big(const ToricArithDivisor& d, const CurveOptions& opts = {});

struct RelativeZariski {
  ToricArithDivisor Q;
  ToricArithDivisor N;
};

/// Q = (D, u**), N = (0, u - u**). Requires deg(D_K) >= 0.
RelativeZariski relative_zariski(const ToricArithDivisor& d, const CurveOptions& opts = {});

struct NegativePiece {
  /// "H0", "H1" or "function".
  std::string label;
  ToricArithDivisor divisor;
  /// c_1 of the piece is a positive current (true for the H0 / H1 pieces).
  bool positive_current = false;
};

struct ZariskiFlags {
  bool nef_D = false;
  bool pseudo_effective_D = false;
  bool big_D = false;
  bool relatively_nef_D = false;
  bool consistent_thm_4_3 = false;
  bool consistent_cor_4_4 = false;
  bool consistent_thm_2_1 = false;
  bool consistent_thm_5_1 = false;
};

struct ZariskiReport {
  ToricArithDivisor P;
  std::vector<NegativePiece> N_pieces;
  /// deg(P . N_i) per piece.
  std::vector<double> orthogonality;
  /// Labels and Gram matrix of the positive-current pieces.
  std::vector<std::string> gram_labels;
  std::vector<std::vector<double>> gram;
  std::vector<double> gram_eigenvalues;
  /// deg(P . N) and deg(N^2) for the whole negative part.
  double p_dot_n = 0.0;
  double n_self = 0.0;
  double vol_P = 0.0;
  double vol_D = 0.0;
  double deg_self_D = 0.0;
  double vol_chi_D = 0.0;
  Interval theta;
  /// Contact points of the supporting lines of slopes min/max Theta (+-inf if open).
  double t_minus = 0.0;
  double t_plus = 0.0;
  ZariskiFlags flags;

  ToricArithDivisor N() const;
};

/// Greatest nef minorant decomposition. Throws InputError if D is not pseudo-effective.
ZariskiReport zariski(const ToricArithDivisor& d, const PositivityOptions& opts = {});

struct GramResult {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> matrix;
  std::vector<double> eigenvalues;
  bool negative_definite = true;
};

/// Gram matrix of the positive-current pieces of N. Empty for nef input.
/// Throws PropertyViolation if deg(P . C_i) != 0 or an eigenvalue is positive.
GramResult gram_negative_part(const ToricArithDivisor& d, const PositivityOptions& opts = {});
GramResult gram_of(const ZariskiReport& report, const PositivityOptions& opts = {});

/// Symmetric eigenvalues in increasing order.
std::vector<double> symmetric_eigenvalues(const std::vector<std::vector<double>>& m);

struct AutissierSection {
  int n = 0;
  PrincipalMonomial monomial;
  /// ||phi||_{nD} and the target bound exp(-n deg(D^2) / (2 deg D_K) + n eps).
  double norm = 0.0;
  double bound = 0.0;
};

/// Smallest n <= n_max with a monomial section of nD below the bound. Throws
/// NumericError ("increase n_max") when none is found.
AutissierSection autissier_section(const ToricArithDivisor& d, double eps, int n_max,
                                   const PositivityOptions& opts = {});

struct TheoremCheck {
  double deg_self = 0.0;
  double vol = 0.0;
  double vol_chi = 0.0;
  bool integrable = true;
  bool nef = false;
  bool relatively_nef = false;
  bool pseudo_effective = false;
  bool big = false;
  bool thm_2_1 = false;
  bool thm_4_3 = false;
  bool cor_4_4 = false;
  bool thm_5_1 = false;
  std::optional<double> n_self;
  std::optional<double> p_dot_n;

  bool all() const { return thm_2_1 && thm_4_3 && cor_4_4 && thm_5_1; }
};

TheoremCheck verify_main_theorem(const ToricArithDivisor& d, const PositivityOptions& opts = {});

}  // namespace arakzar
