#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace invman {

struct GapCheck {
  bool pass = false;
  double ratio = 0.0;  ///< (gamma - rho) / ell
  double threshold = 0.0;
  double margin = 0.0;  ///< ratio - threshold
};

/// max{M^2 + 2M + sqrt(8 M^3), 3M^2 + 2M}
double gap_threshold(double M);
GapCheck gap_condition(double M, double gamma, double rho, double ell);

struct ParabolicParams {
  double N = 1.0;
  double alpha = 0.5;
};

struct ParabolicConstants {
  double N = 0.0;
  double alpha = 0.0;
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  double kappa_star = 0.0;
  double kappa_chosen = 0.0;
  double delta = 0.0;
  double nu = 0.0;
  bool admissible = false;
};

struct ConstantsLedger {
  double M = 1.0;
  double gamma = 0.0;
  double rho = 0.0;
  double ell = 0.0;
  double gap_threshold = 0.0;
  double gap_ratio = 0.0;
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  double kappa_star = 0.0;
  double kappa_chosen = 0.0;
  double delta = 0.0;      ///< attraction rate towards the manifold
  double delta_hat = 0.0;  ///< stable-side rate
  double nu = 0.0;         ///< contraction factor of the graph transform
  std::optional<ParabolicConstants> parabolic;

  /// T with exp(-(gamma - rho - 2 M ell (1 + kappa)) T) <= tol.
  double tail_horizon(double tol) const;
  /// Exponent of in-manifold growth in backward time: rho + ell M (1 + kappa).
  double manifold_growth() const;
  /// Forward decay on the stable manifold: gamma - M ell (1 + kappa).
  double stable_decay() const;

  std::vector<std::pair<std::string, double>> entries() const;
};

/// Closed-form constants with kappa_chosen = kappa_minus. Without a parabolic
/// block the gap condition must pass; with one, the parabolic inequalities
/// must be satisfiable instead.
ConstantsLedger constants_ledger(double M, double gamma, double rho, double ell,
                                 std::optional<ParabolicParams> parabolic = std::nullopt);

/// A ledger with a different kappa (used to exercise contract checks).
ConstantsLedger with_kappa(const ConstantsLedger& ledger, double kappa);

}  // namespace invman
