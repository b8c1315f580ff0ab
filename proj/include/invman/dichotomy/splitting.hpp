#pragma once

#include <vector>

#include "invman/core/generator.hpp"
#include "invman/core/linalg.hpp"
#include "invman/core/time_grid.hpp"

namespace invman {

struct SplittingResiduals {
  double idempotency = 0.0;   ///< max ||Q^2 - Q||
  double commutation = 0.0;   ///< max ||Q(t)L(t,s) - L(t,s)Q(s)|| / ||L(t,s)||
  double forward_ratio = 0.0;   ///< worst ||L(t,s)(I-Q(s))|| e^{gamma(t-s)} / M
  double backward_ratio = 0.0;  ///< worst ||L(t,s)Q(s)|| e^{rho(t-s)} / M, t <= s
};

/// Projections Q(t) at the nodes of a grid with constants (M, gamma, rho):
///   ||L(t,s) Q(s)||     <= M e^{-rho (t-s)},   t <= s
///   ||L(t,s) (I-Q(s))|| <= M e^{-gamma (t-s)}, t >= s
struct SplittingCertificate {
  TimeGrid grid{0.0, 1.0, 1};
  std::vector<Mat> projections;
  double M = 1.0;
  double gamma = 0.0;
  double rho = 0.0;
  int rank = 0;
  int dim = 0;
  /// Finite-window growth exponents averaged over nodes, descending.
  std::vector<double> exponents;
  SplittingResiduals residuals;

  /// Throws ContractViolation when an invariant of the type fails.
  void validate(double tol_proj = 1e-8) const;
};

struct SplittingOptions {
  double window = 5.0;
  double step = 1e-2;
  double degenerate_ratio = 10.0;
  double m_inflation = 0.05;
};

SplittingCertificate estimate_splitting(const Generator& proc, int rank, const TimeGrid& grid,
                                        const SplittingOptions& opts = {});

struct SplittingReport {
  double worst_forward = 0.0;
  double worst_backward = 0.0;
  double commutation = 0.0;
  double idempotency = 0.0;
  int pairs = 0;
  double tol = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double tol = 1e-6;
  double step = 1e-2;
  unsigned seed = 20240601u;
};

/// Checks the certificate on node pairs: all pairs when there are at most
/// `samples` of them, otherwise a seeded subset that always contains the
/// adjacent pairs and the widest pair.
SplittingReport verify_splitting(const Generator& proc, const SplittingCertificate& cert, int samples,
                                 const VerifyOptions& opts = {});

struct NestednessReport {
  double image_residual = 0.0;   ///< max ||(I - Q_coarse) Q_fine||
  double kernel_residual = 0.0;  ///< max ||Q_fine (I - Q_coarse)||
  double tol = 0.0;
  bool pass = false;
};

NestednessReport nestedness_check(const SplittingCertificate& coarse, const SplittingCertificate& fine,
                                  double tol = 1e-8);

struct ShiftedDichotomy {
  Generator generator;
  SplittingCertificate certificate;
  double shift = 0.0;
};

/// Rescales by e^{(gamma+rho)/2 (t-s)}: same projections, exponents
/// gamma' = -rho' = (gamma - rho)/2.
ShiftedDichotomy shift_to_dichotomy(const Generator& proc, const SplittingCertificate& cert);

}  // namespace invman
