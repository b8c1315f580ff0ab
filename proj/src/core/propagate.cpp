#include "invman/core/propagate.hpp"

#include <cmath>
#include <limits>

#include "invman/core/errors.hpp"

namespace invman {

int step_count(double span, double h) {
  if (!(h > 0.0)) throw InvalidArgument("step must be positive");
  const double n = std::ceil(std::abs(span) / h - 1e-9);
  return std::max(1, static_cast<int>(n));
}

Trajectory integrate(const VectorField& field, double t0, const Vec& u0, double t1, const IntegrateOptions& opts) {
  if (!u0.allFinite()) throw InvalidArgument("initial state has non-finite entries");
  std::vector<double> times{t0};
  std::vector<Vec> states{u0};
  if (t1 == t0) return Trajectory(std::move(times), std::move(states));
  const int n = step_count(t1 - t0, opts.step);
  const double h = (t1 - t0) / n;
  Vec u = u0;
  std::vector<Vec> derivs;
  const bool hermite = opts.record && opts.derivatives;
  auto slope = [&](double t, const Vec& x) -> Vec {
    return opts.projection ? Vec(opts.projection(t) * field(t, x)) : field(t, x);
  };
  if (opts.record) {
    times.reserve(n + 1);
    states.reserve(n + 1);
  }
  if (hermite) derivs.push_back(slope(t0, u0));
  for (int k = 0; k < n; ++k) {
    const double t = t0 + k * h;
    const double tn = (k + 1 == n) ? t1 : t0 + (k + 1) * h;
    u = rk4_step(field, t, u, h);
    if (opts.projection) u = opts.projection(tn) * u;
    const double size = u.norm();
    if (!std::isfinite(size) || size > opts.ceiling)
      throw BlowUp("state norm exceeded ceiling at t=" + std::to_string(tn));
    if (opts.record || k + 1 == n) {
      times.push_back(tn);
      states.push_back(u);
      if (hermite) derivs.push_back(slope(tn, u));
    }
  }
  return Trajectory(std::move(times), std::move(states), std::move(derivs));
}

namespace {

void check_window(const TimeGrid& grid, double tau, double t) {
  if (!grid.contains(tau) || !grid.contains(t)) throw OutOfDomain("propagation times outside the grid");
}

}  // namespace

StateVector propagate_linear(const Generator& gen, double tau, double t, const StateVector& u0, const TimeGrid& grid,
                             const ProjectionFamily& invertible_subspace) {
  check_window(grid, tau, t);
  if (u0.dim() != gen.dim()) throw InvalidArgument("state dimension does not match generator");
  if (t == tau) return u0;
  if (t < tau && !invertible_subspace)
    throw PreconditionFailure("backward propagation needs an invertible invariant subspace");
  IntegrateOptions opts;
  opts.step = grid.step();
  opts.ceiling = std::numeric_limits<double>::infinity();
  opts.record = false;
  Vec start = u0.coords();
  if (t < tau) {
    opts.projection = invertible_subspace;
    start = invertible_subspace(tau) * start;
  }
  auto field = [&gen](double s, const Vec& u) { return gen.apply_linear(s, u); };
  Trajectory tr = integrate(field, tau, start, t, opts);
  return StateVector(tr.states().back());
}

Mat propagator(const Generator& gen, double tau, double t, double step) {
  if (t < tau) throw PreconditionFailure("propagator is computed forward only");
  const int d = gen.dim();
  Mat phi = Mat::Identity(d, d);
  if (t == tau) return phi;
  const int n = step_count(t - tau, step);
  const double h = (t - tau) / n;
  if (gen.is_autonomous()) {
    // One RK4 step is the polynomial I + hA + ... + (hA)^4/24 applied to phi.
    const Mat a = gen.linear(0.0);
    const Mat ha = h * a;
    Mat poly = Mat::Identity(d, d);
    Mat term = Mat::Identity(d, d);
    for (int k = 1; k <= 4; ++k) {
      term = term * ha / static_cast<double>(k);
      poly += term;
    }
    for (int k = 0; k < n; ++k) phi = poly * phi;
    return phi;
  }
  for (int k = 0; k < n; ++k) {
    const double s = tau + k * h;
    const Mat a0 = gen.linear(s);
    const Mat a1 = gen.linear(s + 0.5 * h);
    const Mat a2 = gen.linear(s + h);
    const Mat k1 = a0 * phi;
    const Mat k2 = a1 * (phi + 0.5 * h * k1);
    const Mat k3 = a1 * (phi + 0.5 * h * k2);
    const Mat k4 = a2 * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

StateVector propagate_semilinear(const Generator& gen, double tau, double t, const StateVector& u0, const TimeGrid& grid,
                                 const SemilinearOptions& opts) {
  check_window(grid, tau, t);
  if (t < tau) throw PreconditionFailure("semilinear propagation is forward only");
  if (u0.dim() != gen.dim()) throw InvalidArgument("state dimension does not match generator");
  if (t == tau) return u0;
  IntegrateOptions io;
  io.step = grid.step();
  io.ceiling = opts.ceiling;
  io.record = false;
  auto field = [&gen](double s, const Vec& u) { return gen.field(s, u); };
  return StateVector(integrate(field, tau, u0.coords(), t, io).states().back());
}

Trajectory flow(const Generator& gen, double tau, double t, const Vec& u0, double step, double ceiling) {
  if (t < tau) throw PreconditionFailure("flow is forward only");
  IntegrateOptions io;
  io.step = step;
  io.ceiling = ceiling;
  auto field = [&gen](double s, const Vec& u) { return gen.field(s, u); };
  return integrate(field, tau, u0, t, io);
}

}  // namespace invman
