#pragma once

#include <string>
#include <vector>

#include "invman/dichotomy/splitting.hpp"
#include "invman/pde/reduced.hpp"

namespace invman {

enum class InvariantLine { E1, E2 };  ///< z1 = z2 and z1 = -z2
std::string to_string(InvariantLine l);

struct HyperbolicOptions {
  double horizon = 20.0;         ///< solutions are sampled on [-horizon, horizon]
  double pullback_depth = 20.0;  ///< initial depth beyond -horizon, doubled until Cauchy
  double max_depth = 2000.0;
  double cauchy_tol = 1e-8;
  double step = 1e-2;
  double min_margin = 0.05;  ///< required inf |z| along candidates
};

struct HyperbolicCandidate {
  InvariantLine line = InvariantLine::E1;
  int sign = 1;
  Trajectory z;  ///< (z1, z2) on [-horizon, horizon]
  double depth = 0.0;
  double cauchy = 0.0;
  double margin = 0.0;   ///< inf |z1| on the samples
  double sup_abs = 0.0;  ///< sup |z1| on the samples
  int expected_unstable = 0;
};

struct CandidateSet {
  std::vector<HyperbolicCandidate> candidates;
  bool in_regime = false;      ///< alpha0/beta0 in (1/3, 1/2), beta in [1, 2]
  double comparison_lo = 0.0;  ///< 1/sqrt(beta_hi)
  double comparison_hi = 0.0;  ///< 1/sqrt(beta_lo)
};

/// The four bounded solutions on E1 and E2 by scalar pullback with depth doubling.
CandidateSet find_hyperbolic_solutions(const ReducedSystem& z_system, const HyperbolicOptions& opts = {});

struct HyperbolicityOptions {
  double window = 5.0;
  int nodes = 16;
  double min_rate = 0.05;
  int samples = 64;
  VerifyOptions verify;
};

struct HyperbolicityReport {
  SplittingCertificate cert;
  SplittingReport verification;
  bool degenerate = false;
  double rate_margin = 0.0;  ///< min(gamma, -rho)
  bool pass = false;
  std::string note;
};

/// Dichotomy certificate for the linearization along a candidate.
HyperbolicityReport verify_hyperbolicity(const HyperbolicCandidate& candidate, const ReducedSystem& z_system,
                                         const HyperbolicityOptions& opts = {});

}  // namespace invman
