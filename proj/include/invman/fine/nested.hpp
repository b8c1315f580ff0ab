#pragma once

#include <vector>

#include "invman/graph/solver.hpp"

namespace invman {

struct NestedOptions {
  GridSpec coarse_grid;  ///< over Im Q_coarse
  GridSpec fast_grid;    ///< over Im Q_fine
  GridSpec slow_grid;    ///< over the slow coordinates of the reduced system
  FixedPointOptions fixed_point;
  SplittingOptions reduced_splitting;
};

/// Coordinates on the coarse manifold: a' = E(t)(A(t)B(t) - B'(t)) a + E(t) f(t, lift(a)).
struct ReducedCoordinates {
  Generator generator;  ///< linear part only
  Nonlinearity f;
};

struct NestedManifolds {
  GraphSolution coarse;  ///< W_coarse, a graph over Im Q_coarse
  GraphSolution fast;    ///< W_fast, a graph over Im Q_fine
  GraphSolution slow;    ///< W_slow, a graph over the slow reduced coordinates
  ReducedCoordinates reduced;
  SplittingCertificate reduced_cert;
  ConstantsLedger coarse_ledger;
  ConstantsLedger fine_ledger;
  ConstantsLedger reduced_ledger;
  double delta_bar = 0.0;
  double containment = 0.0;  ///< max distance of W_fast node points to W_coarse
};

/// gamma - rho - 2 M ell - 2 M^2 ell^2 (1 + kappa)(1 + M) / (gamma - rho - ell M (1 + kappa)).
double delta_bar(const ConstantsLedger& fine);

NestedManifolds build_nested(const Generator& proc, const SplittingCertificate& coarse_cert,
                             const SplittingCertificate& fine_cert, const Nonlinearity& f,
                             const NestedOptions& opts);

struct RatioSamples {
  std::vector<double> taus;
  std::vector<double> ratios;
  std::vector<double> angles;  ///< angle between T(tau,t)u and Im Q_fine(tau), radians
  double fitted_rate = 0.0;
  double delta_bar = 0.0;
  double worst_bound_ratio = 0.0;  ///< max of r(tau) / (M^2 e^{-delta_bar (t - tau)} r(t))
  bool truncated = false;
  bool bound_holds = false;
  bool eventually_decreasing = false;
};

/// r(tau) = |(I - P_slow(tau)) T(tau,t)u| / |(I - P_fast(tau)) T(tau,t)u| for tau <= t.
/// P_fast is the nonlinear projection onto W_fast; P_slow projects along the fast coordinates.
RatioSamples tangency_ratio(const NestedManifolds& nested, const Vec& u0, double t, const std::vector<double>& taus,
                            double step = 1e-2, double tol = 1e-6);

}  // namespace invman
