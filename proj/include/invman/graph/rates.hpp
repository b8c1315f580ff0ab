#pragma once

#include <limits>
#include <string>
#include <vector>

#include "invman/core/trajectory.hpp"
#include "invman/graph/solver.hpp"

namespace invman {

struct RateSample {
  double tau = 0.0;
  Vec base;  ///< start point in graph base coordinates
};

struct RateOptions {
  double horizon = 4.0;
  double step = 1e-2;
  double tol = 0.05;
  /// Vertical offset of off-graph starts, relative to the largest graph extent.
  double offset = 1e-3;
};

struct RateCheck {
  std::string name;
  std::string relation;  ///< "<=" or ">="
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;
};

struct RatesReport {
  std::vector<RateCheck> checks;
  bool pass = true;
};

/// Exponential rates fitted on sampled trajectories. A graph over Im Q gets the
/// in-manifold backward growth and the off-manifold decay checks; a graph over
/// Ker Q gets the stable-side decay and separation checks.
RatesReport verify_rates(const GraphField& field, const Generator& proc, const Nonlinearity& f,
                         const ConstantsLedger& ledger, const std::vector<RateSample>& samples,
                         const RateOptions& opts = {});

struct PhaseOptions {
  double step = 1e-2;
  double extra = 2.0;        ///< pullback times spread over [tau+H, tau+H+extra]
  int pullbacks = 4;
  double cauchy_tol = 1e-8;  ///< relative
  double rate_tol = 0.1;
  Extent extent = Extent::clamp_time;
};

struct PhaseResult {
  Trajectory shadow;    ///< base coordinates of the in-manifold solution
  Trajectory solution;  ///< T(t, tau) u0
  std::vector<double> times;
  std::vector<double> distances;
  double fitted_rate = 0.0;
  double delta = 0.0;
  double cauchy = 0.0;
  bool pass = false;
};

/// In-manifold shadow of the solution through u0 as the limit of pullbacks
/// q*(., t_n) with t_n -> infinity, and the decay of the distance to it.
PhaseResult asymptotic_phase(const GraphField& sigma, const Generator& proc, const Nonlinearity& f,
                             const ConstantsLedger& ledger, const Vec& u0, double tau, double horizon,
                             const PhaseOptions& opts = {});

struct SaddlePair {
  GraphSolution unstable;
  GraphSolution stable;
};

/// Unstable and stable manifolds of the zero solution for a dichotomy (rho = -gamma).
SaddlePair saddle_point(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                        const ConstantsLedger& ledger, const GridSpec& unstable_grid, const GridSpec& stable_grid,
                        const FixedPointOptions& opts = {});

}  // namespace invman
