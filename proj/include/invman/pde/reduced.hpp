#pragma once

#include <functional>
#include <string>

#include "invman/core/generator.hpp"
#include "invman/core/trajectory.hpp"
#include "invman/graph/solver.hpp"
#include "invman/pde/spectrum.hpp"

namespace invman {

/// beta(t) with known range [lo, hi].
struct BetaFunction {
  std::function<double(double)> fn;
  double lo = 1.0;
  double hi = 1.0;
  std::string label;

  static BetaFunction constant(double b);
  /// mean + amplitude sin(frequency t)
  static BetaFunction sinusoid(double mean, double amplitude, double frequency = 1.0);

  double operator()(double t) const { return fn(t); }
};

/// f(t,u) = u - beta(t) u^3 and its u-derivative.
inline double reaction(const BetaFunction& b, double t, double u) { return u - b(t) * u * u * u; }
inline double reaction_du(const BetaFunction& b, double t, double u) { return 1.0 - 3.0 * b(t) * u * u; }

enum class ReducedVariant { galerkin, inertial, limiting_uv, limiting_z };
std::string to_string(ReducedVariant v);

/// Coefficients of the nu -> 0 limit.
struct LimitingCoefficients {
  double x_star = 0.5;
  double alpha0 = 1.0;
  double beta0 = 2.4;
  double a1 = 0.0;      ///< alpha0 / (2 beta0 x*)
  double a2 = 0.0;      ///< alpha0 / (2 beta0 (1 - x*))
  double k1 = 1.0;      ///< sqrt((1 - x*) / x*)
  double lambda = 0.0;  ///< a1 + a2, the decay rate of u2

  static LimitingCoefficients from(double x_star, double alpha0, double beta0);
};

/// u' = L u + N(t, u) with constant L.
struct ReducedSystem {
  ReducedVariant variant = ReducedVariant::galerkin;
  Mat linear;
  std::function<Vec(double, const Vec&)> nonlinear;
  BetaFunction beta;
  LimitingCoefficients coeffs;

  int dim() const { return static_cast<int>(linear.rows()); }
  Vec field(double t, const Vec& u) const { return linear * u + nonlinear(t, u); }
  /// Exact for the limiting variants, central differences otherwise.
  Mat jacobian(double t, const Vec& u) const;
  /// Lawson RK4 (integrating factor) for diagonal L, classical RK4 otherwise.
  Trajectory integrate(double t0, const Vec& u0, double t1, double step = 1e-2) const;
  Generator generator(double lipschitz) const;
};

/// n-mode Galerkin system u_k' = -lambda_k u_k + sum_i w_i f(t, U_i) phi_k(x_i), U = sum_j u_j phi_j.
ReducedSystem galerkin_project(const Spectrum& spectrum, int n, const BetaFunction& beta);

struct LimitingSystems {
  ReducedSystem uv;
  ReducedSystem z;
};

/// z1' = a1 (z2 - z1) + f(t, z1), z2' = -a2 (z2 - z1) + f(t, z2), and its exact
/// conjugate in u1 = x* z1 + (1-x*) z2, u2 = x* k1 (z2 - z1).
LimitingSystems limiting_systems(double x_star, double alpha0, double beta0, const BetaFunction& beta);

/// The limiting u-system with the coefficients as printed in the source
/// (u2 decay alpha0 / (2 beta0 (1-x*)), first term of f2 without k1).
ReducedSystem limiting_uv_literal(double x_star, double alpha0, double beta0, const BetaFunction& beta);

Vec uv_to_z(const LimitingCoefficients& c, const Vec& u);
Vec z_to_uv(const LimitingCoefficients& c, const Vec& z);

/// Exact certificate of the diagonal generator -diag(lambda) with Q onto the first `rank` modes.
SplittingCertificate diagonal_certificate(const std::vector<double>& lambdas, int rank, const TimeGrid& grid);

struct InertialOptions {
  double radius = 0.2;  ///< cut-off radius in mode coordinates
  double ramp = 0.2;
  double extent = 0.3;  ///< graph grid over the first two modes
  int count = 11;
  TimeGrid times{0.0, 6.283185307179586, 8};
  double step = 1e-2;  ///< capped at 1/lambda_n inside the solver
  FixedPointOptions fixed_point;
  int threads = 1;
};

struct InertialReduction {
  ReducedSystem system;  ///< two-mode system on the graph
  GraphSolution sigma;
  SplittingCertificate cert;
  ConstantsLedger ledger;
};

/// Two-mode reduction of an n-mode Galerkin system through its inertial graph over modes 1-2.
InertialReduction inertial_reduction(const ReducedSystem& galerkin, const InertialOptions& opts = {});

}  // namespace invman
