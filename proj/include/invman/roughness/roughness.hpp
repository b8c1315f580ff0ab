#pragma once

#include <vector>

#include "invman/dichotomy/splitting.hpp"
#include "invman/graph/solver.hpp"

namespace invman {

struct PerturbationBound {
  bool pass = false;
  double bound = 0.0;  ///< 2 gamma / (3 M (M + 1))
  double margin = 0.0;
};

PerturbationBound perturbation_bound(double gamma, double M, double ell);

struct RoughnessConstants {
  double kappa = 0.0;
  double M_ell = 0.0;           ///< M (1 + kappa) / (1 - 2 kappa)
  double gamma_ell = 0.0;       ///< gamma - ell M (1 + kappa)
  double distance_bound = 0.0;  ///< 2 kappa / (1 - 2 kappa)
};

/// Constants of the perturbed dichotomy for f(t,u) = B(t)u with |B| <= ledger.ell.
RoughnessConstants roughness_constants(const ConstantsLedger& ledger);

/// Linear perturbation B(t) with sup-norm bound ell.
struct Perturbation {
  Generator::LinearPart B;
  double ell = 0.0;

  static Perturbation constant(const Mat& B);
};

struct LinearGraphs {
  GraphSolution sigma;
  GraphSolution theta;
  ConstantsLedger ledger;
  double superposition_residual = 0.0;
};

struct RoughnessOptions {
  double extent = 2.0;
  int count = 5;
  double step = 1e-2;
  FixedPointOptions fixed_point{1e-12, 200, std::nullopt, true};
  int threads = 1;
};

/// Sigma and Theta of the dichotomy perturbed by f(t,u) = B(t)u.
LinearGraphs linear_graphs(const Generator& proc, const SplittingCertificate& cert, const Perturbation& B,
                           const RoughnessOptions& opts = {});

/// Q_ell(t)u = P_Sigma(t) v_u with v_u the fixed point of v <- u - Sigma(t,v) - Theta(t,v).
Vec perturbed_projection(const GraphField& sigma, const GraphField& theta, double t, const Vec& u,
                         double tol_fp = 1e-14, int max_iterations = 200);

/// Q_ell at the node time t, assembled column by column.
Mat perturbed_projection_matrix(const GraphField& sigma, const GraphField& theta, double t, double tol_fp = 1e-14);

struct PerturbedDichotomy {
  TimeGrid grid{0.0, 1.0, 1};
  std::vector<Mat> Q_ell_nodes;
  double ell = 0.0;
  double ell_bound = 0.0;
  double M_ell = 0.0;
  double gamma_ell = 0.0;
  double kappa_ell = 0.0;
  double distance = 0.0;  ///< max over nodes of ||Q - Q_ell||
  double distance_bound = 0.0;
  double idempotency = 0.0;
  bool thin_margin = false;
  SplittingReport report;
  bool pass = false;

  SplittingCertificate as_certificate(int rank) const;
};

/// Verifies (M_ell, gamma_ell, -gamma_ell) for the perturbed process and the
/// distance bound 2 kappa / (1 - 2 kappa).
PerturbedDichotomy certify_perturbed(const Generator& proc, const SplittingCertificate& cert, const Perturbation& B,
                                     const LinearGraphs& graphs, int samples = 64, const VerifyOptions& opts = {});

}  // namespace invman
