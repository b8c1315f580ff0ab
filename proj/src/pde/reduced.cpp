#include "invman/pde/reduced.hpp"

#include <cmath>
#include <memory>

#include "invman/core/errors.hpp"
#include "invman/core/propagate.hpp"
#include "invman/graph/cutoff.hpp"

namespace invman {

BetaFunction BetaFunction::constant(double b) {
  if (!(b > 0.0)) throw InvalidArgument("beta must be positive");
  return BetaFunction{[b](double) { return b; }, b, b, "constant"};
}

BetaFunction BetaFunction::sinusoid(double mean, double amplitude, double frequency) {
  if (!(mean - std::abs(amplitude) > 0.0)) throw InvalidArgument("beta must stay positive");
  return BetaFunction{[=](double t) { return mean + amplitude * std::sin(frequency * t); }, mean - std::abs(amplitude),
                      mean + std::abs(amplitude), "sinusoid"};
}

std::string to_string(ReducedVariant v) {
  switch (v) {
    case ReducedVariant::galerkin: return "galerkin";
    case ReducedVariant::inertial: return "inertial";
    case ReducedVariant::limiting_uv: return "limiting_uv";
    case ReducedVariant::limiting_z: return "limiting_z";
  }
  return "?";
}

LimitingCoefficients LimitingCoefficients::from(double x_star, double alpha0, double beta0) {
  if (!(x_star > 0.0 && x_star < 1.0)) throw InvalidArgument("x_star must lie in (0,1)");
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) throw InvalidArgument("alpha0 and beta0 must be positive");
  LimitingCoefficients c;
  c.x_star = x_star;
  c.alpha0 = alpha0;
  c.beta0 = beta0;
  c.a1 = alpha0 / (2.0 * beta0 * x_star);
  c.a2 = alpha0 / (2.0 * beta0 * (1.0 - x_star));
  c.k1 = std::sqrt((1.0 - x_star) / x_star);
  c.lambda = c.a1 + c.a2;
  return c;
}

Mat ReducedSystem::jacobian(double t, const Vec& u) const {
  if (variant == ReducedVariant::limiting_z) {
    Mat J = linear;
    J(0, 0) += reaction_du(beta, t, u(0));
    J(1, 1) += reaction_du(beta, t, u(1));
    return J;
  }
  if (variant == ReducedVariant::limiting_uv) {
    const LimitingCoefficients& c = coeffs;
    const Vec z = uv_to_z(c, u);
    const double d1 = reaction_du(beta, t, z(0)), d2 = reaction_du(beta, t, z(1));
    // d z / d u = [[1, -k1], [1, 1/k1]]
    Mat dz(2, 2);
    dz << 1.0, -c.k1, 1.0, 1.0 / c.k1;
    Mat dn(2, 2);
    dn << c.x_star * d1, (1.0 - c.x_star) * d2, -c.x_star * c.k1 * d1, c.x_star * c.k1 * d2;
    return linear + dn * dz;
  }
  const int n = dim();
  Mat J(n, n);
  for (int k = 0; k < n; ++k) {
    const double h = 1e-5 * (1.0 + std::abs(u(k)));
    Vec up = u, um = u;
    up(k) += h;
    um(k) -= h;
    J.col(k) = (field(t, up) - field(t, um)) / (2.0 * h);
  }
  return J;
}

Trajectory ReducedSystem::integrate(double t0, const Vec& u0, double t1, double step) const {
  if (u0.size() != dim()) throw InvalidArgument("initial state has wrong dimension");
  const bool diagonal = linear.isDiagonal(0.0);
  if (!diagonal) {
    IntegrateOptions io;
    io.step = step;
    io.ceiling = 1e12;
    return ::invman::integrate([this](double t, const Vec& u) { return field(t, u); }, t0, u0, t1, io);
  }
  const int n = step_count(t1 - t0, step);
  const double h = (t1 - t0) / n;
  const Vec L = linear.diagonal();
  const Vec E = (L * h).array().exp().matrix();
  const Vec Eh = (L * (0.5 * h)).array().exp().matrix();
  std::vector<double> ts{t0};
  std::vector<Vec> us{u0}, ds{field(t0, u0)};
  Vec u = u0;
  for (int k = 0; k < n; ++k) {
    const double t = t0 + k * h;
    const Vec k1 = nonlinear(t, u);
    const Vec k2 = nonlinear(t + 0.5 * h, Eh.cwiseProduct(u + 0.5 * h * k1));
    const Vec k3 = nonlinear(t + 0.5 * h, Eh.cwiseProduct(u) + 0.5 * h * k2);
    const Vec k4 = nonlinear(t + h, E.cwiseProduct(u) + h * Eh.cwiseProduct(k3));
    u = E.cwiseProduct(u) + (h / 6.0) * (E.cwiseProduct(k1) + 2.0 * Eh.cwiseProduct(k2 + k3) + k4);
    if (!u.allFinite() || u.norm() > 1e12) throw BlowUp("reduced system blew up");
    const double tn = (k + 1 == n) ? t1 : t0 + (k + 1) * h;
    ts.push_back(tn);
    us.push_back(u);
    ds.push_back(field(tn, u));
  }
  return Trajectory(std::move(ts), std::move(us), std::move(ds));
}

Generator ReducedSystem::generator(double lipschitz) const {
  auto nl = nonlinear;
  return Generator::autonomous(linear, Nonlinearity{[nl](double t, const Vec& u) { return nl(t, u); }, lipschitz, true});
}

ReducedSystem galerkin_project(const Spectrum& spectrum, int n, const BetaFunction& beta) {
  if (n < 2) throw InvalidArgument("Galerkin truncation needs n >= 2");
  if (n > static_cast<int>(spectrum.phis.size())) throw InvalidArgument("spectrum has fewer modes than requested");
  const Discretization& d = spectrum.disc;
  const int N = d.size();
  auto Phi = std::make_shared<Mat>(N, n);
  for (int k = 0; k < n; ++k) Phi->col(k) = spectrum.phis[k];
  auto w = std::make_shared<Vec>(Eigen::Map<const Vec>(d.w.data(), N));
  const double mass = (w->array() * Phi->col(0).array().square()).sum();
  if (std::abs(mass - 1.0) > 1e-10) throw StructuralError("phi_1 is not normalized in the discrete inner product");

  ReducedSystem sys;
  sys.variant = ReducedVariant::galerkin;
  sys.linear = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) sys.linear(k, k) = -spectrum.lambdas[k];
  sys.beta = beta;
  sys.nonlinear = [Phi, w, beta](double t, const Vec& u) -> Vec {
    const Vec U = *Phi * u;
    const double b = beta(t);
    const Vec F = (w->array() * (U.array() - b * U.array().cube())).matrix();
    return Phi->transpose() * F;
  };
  return sys;
}

Vec uv_to_z(const LimitingCoefficients& c, const Vec& u) {
  Vec z(2);
  z << u(0) - c.k1 * u(1), u(0) + u(1) / c.k1;
  return z;
}

Vec z_to_uv(const LimitingCoefficients& c, const Vec& z) {
  Vec u(2);
  u << c.x_star * z(0) + (1.0 - c.x_star) * z(1), c.x_star * c.k1 * (z(1) - z(0));
  return u;
}

LimitingSystems limiting_systems(double x_star, double alpha0, double beta0, const BetaFunction& beta) {
  const LimitingCoefficients c = LimitingCoefficients::from(x_star, alpha0, beta0);
  ReducedSystem z;
  z.variant = ReducedVariant::limiting_z;
  z.coeffs = c;
  z.beta = beta;
  z.linear.resize(2, 2);
  z.linear << -c.a1, c.a1, c.a2, -c.a2;
  z.nonlinear = [beta](double t, const Vec& v) {
    Vec out(2);
    out << reaction(beta, t, v(0)), reaction(beta, t, v(1));
    return out;
  };

  ReducedSystem uv;
  uv.variant = ReducedVariant::limiting_uv;
  uv.coeffs = c;
  uv.beta = beta;
  uv.linear = Mat::Zero(2, 2);
  uv.linear(1, 1) = -c.lambda;
  uv.nonlinear = [c, beta](double t, const Vec& u) {
    const Vec zz = uv_to_z(c, u);
    const double f1 = reaction(beta, t, zz(0)), f2 = reaction(beta, t, zz(1));
    Vec out(2);
    out << c.x_star * f1 + (1.0 - c.x_star) * f2, c.x_star * c.k1 * (f2 - f1);
    return out;
  };
  return LimitingSystems{uv, z};
}

ReducedSystem limiting_uv_literal(double x_star, double alpha0, double beta0, const BetaFunction& beta) {
  const LimitingCoefficients c = LimitingCoefficients::from(x_star, alpha0, beta0);
  ReducedSystem uv;
  uv.variant = ReducedVariant::limiting_uv;
  uv.coeffs = c;
  uv.beta = beta;
  uv.linear = Mat::Zero(2, 2);
  uv.linear(1, 1) = -c.a2;
  uv.nonlinear = [c, beta](double t, const Vec& u) {
    const double f1 = reaction(beta, t, u(0) - c.k1 * u(1)), f2 = reaction(beta, t, u(0) + u(1) / c.k1);
    Vec out(2);
    out << c.x_star * f1 + (1.0 - c.x_star) * f2, -c.x_star * f1 + (1.0 - c.x_star) / c.k1 * f2;
    return out;
  };
  return uv;
}

SplittingCertificate diagonal_certificate(const std::vector<double>& lambdas, int rank, const TimeGrid& grid) {
  const int n = static_cast<int>(lambdas.size());
  if (rank < 1 || rank >= n) throw InvalidArgument("rank must lie in [1, n)");
  for (int k = 1; k < n; ++k)
    if (lambdas[k] < lambdas[k - 1]) throw InvalidArgument("eigenvalues must ascend");
  if (!(lambdas[rank] > lambdas[rank - 1])) throw DegenerateGap("no gap between the retained and the remaining modes");
  SplittingCertificate c;
  c.grid = grid;
  Mat Q = Mat::Zero(n, n);
  for (int k = 0; k < rank; ++k) Q(k, k) = 1.0;
  c.projections.assign(grid.n_nodes(), Q);
  c.M = 1.0;
  c.gamma = lambdas[rank];
  c.rho = lambdas[rank - 1];
  c.rank = rank;
  c.dim = n;
  for (int k = 0; k < n; ++k) c.exponents.push_back(-lambdas[k]);
  return c;
}

InertialReduction inertial_reduction(const ReducedSystem& galerkin, const InertialOptions& opts) {
  if (galerkin.variant != ReducedVariant::galerkin) throw InvalidArgument("inertial reduction needs a Galerkin system");
  const int n = galerkin.dim();
  if (n < 3) throw InvalidArgument("inertial reduction needs at least 3 modes");
  std::vector<double> lambdas(n);
  for (int k = 0; k < n; ++k) lambdas[k] = -galerkin.linear(k, k);

  SplittingCertificate cert = diagonal_certificate(lambdas, 2, opts.times);
  Nonlinearity h{galerkin.nonlinear, 1.0, true};
  CutoffOptions co;
  for (int k = 0; k <= 8; ++k) co.sample_times.push_back(opts.times.t_min() + (opts.times.t_max() - opts.times.t_min()) * k / 8.0);
  const Nonlinearity f = cutoff(h, n, opts.radius, opts.ramp, co).as_nonlinearity();
  ConstantsLedger ledger = constants_ledger(cert.M, cert.gamma, cert.rho, f.lipschitz);

  GridSpec grid = GridSpec::uniform(2, opts.extent, opts.count, std::min(opts.step, 1.0 / lambdas.back()));
  grid.threads = opts.threads;
  const Generator gen = Generator::autonomous(galerkin.linear);
  GraphSolution sigma = solve_sigma(gen, cert, f, ledger, grid, opts.fixed_point);

  ReducedSystem red;
  red.variant = ReducedVariant::inertial;
  red.beta = galerkin.beta;
  red.coeffs = galerkin.coeffs;
  red.linear = galerkin.linear.topLeftCorner(2, 2);
  auto field = std::make_shared<const GraphField>(sigma.field);
  red.nonlinear = [field, f](double t, const Vec& a) -> Vec {
    return f.eval(t, field->lift(t, a, Extent::clamp)).head(2);
  };
  return InertialReduction{red, std::move(sigma), std::move(cert), ledger};
}

}  // namespace invman
