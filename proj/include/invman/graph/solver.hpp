#pragma once

#include <optional>
#include <vector>

#include "invman/core/generator.hpp"
#include "invman/core/graph_field.hpp"
#include "invman/core/trajectory.hpp"
#include "invman/dichotomy/splitting.hpp"
#include "invman/graph/constants.hpp"

namespace invman {

struct GridSpec {
  std::vector<AxisSpec> axes;  ///< base-coordinate grid
  double step = 0.02;          ///< integration step
  double grid_slack = 0.05;
  double tol_tail = 1e-8;
  int threads = 1;

  static GridSpec uniform(int dim, double extent, int count, double step = 0.02);
};

struct FixedPointOptions {
  double tol_fp = 1e-10;
  int max_iterations = 100;
  /// Truncation horizon; defaults to ledger.tail_horizon(grid.tol_tail).
  std::optional<double> horizon;
  bool check_lipschitz = true;
};

struct FixedPointStats {
  int iterations = 0;
  std::vector<double> increments;
  double contraction_estimate = 0.0;
  double nu_bound = 0.0;
  double horizon = 0.0;
  double lipschitz = 0.0;
};

struct GraphSolution {
  GraphField field;
  FixedPointStats stats;
};

/// Invariant manifold graph over Im Q(t): fixed point of
///   Sigma(tau, eta) = int_{tau-T}^{tau} L(tau,s)(I-Q(s)) f(s, q(s) + Sigma(s, q(s))) ds
/// with q integrated backward on Im Q from q(tau) = eta.
GraphSolution solve_sigma(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                          const ConstantsLedger& ledger, const GridSpec& grid, const FixedPointOptions& opts = {});

/// Stable manifold graph over Ker Q(t): fixed point of
///   Theta(tau, xi) = -int_{tau}^{tau+T} L(tau,s) Q(s) f(s, p(s) + Theta(s, p(s))) ds
/// with p integrated forward on Ker Q from p(tau) = xi.
GraphSolution solve_theta(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                          const ConstantsLedger& ledger, const GridSpec& grid, const FixedPointOptions& opts = {});

/// One application of the graph transform matching the field's orientation.
GraphField graph_transform(const GraphField& current, const Generator& proc, const Nonlinearity& f, double horizon,
                           double step, int threads = 1);

/// sup over nodes with nonzero base coordinates of |a(t,q) - b(t,q)| / |q|.
double graph_distance(const GraphField& a, const GraphField& b);

struct InvarianceReport {
  double max_residual = 0.0;
  int samples = 0;
  int skipped = 0;
};

/// Flies graph points forward for 1..max_steps steps of the full system and
/// measures their vertical distance to the graph at the arrival time.
InvarianceReport graph_invariance(const GraphField& field, const Generator& proc, const Nonlinearity& f,
                                  int max_steps = 5, double step = 0.02, int stride = 1);

/// Base coordinate dynamics on the graph: a trajectory of base coordinates.
Trajectory manifold_flow(const GraphField& field, const Generator& proc, const Nonlinearity& f, double t0,
                         const Vec& a0, double t1, double step, Extent ext = Extent::clamp_time);

Vec project_sigma(const GraphField& sigma, double t, const Vec& u);
Vec project_theta(const GraphField& theta, double t, const Vec& u);

}  // namespace invman
