#pragma once

#include <functional>
#include <optional>

#include "invman/core/generator.hpp"
#include "invman/core/state.hpp"
#include "invman/core/time_grid.hpp"
#include "invman/core/trajectory.hpp"

namespace invman {

using VectorField = std::function<Vec(double, const Vec&)>;
/// t -> projection onto an invariant subspace on which the process is invertible.
using ProjectionFamily = std::function<Mat(double)>;

template <class F>
Vec rk4_step(const F& f, double t, const Vec& u, double h) {
  const Vec k1 = f(t, u);
  const Vec k2 = f(t + 0.5 * h, u + 0.5 * h * k1);
  const Vec k3 = f(t + 0.5 * h, u + 0.5 * h * k2);
  const Vec k4 = f(t + h, u + h * k3);
  return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of equal steps of size at most h covering |span|.
int step_count(double span, double h);

struct IntegrateOptions {
  double step = 1e-2;
  double ceiling = 1e8;
  /// Applied after every step (re-projection onto an invariant subspace).
  ProjectionFamily projection;
  bool record = true;
  bool derivatives = true;  ///< store f(t,u) for Hermite interpolation
};

/// Fixed-step RK4 from (t0, u0) to t1 in either direction. Records every step
/// unless `record` is false, in which case only the endpoints are kept.
Trajectory integrate(const VectorField& field, double t0, const Vec& u0, double t1, const IntegrateOptions& opts);

StateVector propagate_linear(const Generator& gen, double tau, double t, const StateVector& u0, const TimeGrid& grid,
                             const ProjectionFamily& invertible_subspace = nullptr);

/// Fundamental matrix L(t, tau), t >= tau.
Mat propagator(const Generator& gen, double tau, double t, double step);

struct SemilinearOptions {
  double ceiling = 1e8;
};

StateVector propagate_semilinear(const Generator& gen, double tau, double t, const StateVector& u0, const TimeGrid& grid,
                                 const SemilinearOptions& opts = {});

/// Forward flight of the full field, recorded at every step.
Trajectory flow(const Generator& gen, double tau, double t, const Vec& u0, double step, double ceiling = 1e8);

}  // namespace invman
