#include "invman/roughness/roughness.hpp"

#include <cmath>
#include <random>

#include "invman/core/errors.hpp"
#include "invman/core/linalg.hpp"

namespace invman {

PerturbationBound perturbation_bound(double gamma, double M, double ell) {
  if (!(gamma > 0.0) || !(M >= 1.0) || !(ell >= 0.0)) throw InvalidArgument("perturbation bound needs gamma > 0, M >= 1, ell >= 0");
  PerturbationBound b;
  b.bound = 2.0 * gamma / (3.0 * M * (M + 1.0));
  b.margin = b.bound - ell;
  b.pass = ell < b.bound;
  return b;
}

Perturbation Perturbation::constant(const Mat& B) { return Perturbation{[B](double) { return B; }, op_norm(B)}; }

namespace {

double sampled_sup(const Perturbation& B, const TimeGrid& grid) {
  double s = 0.0;
  for (int i = 0; i < grid.n_nodes(); ++i) s = std::max(s, op_norm(B.B(grid.node(i))));
  return s;
}

double superposition(const GraphField& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  double worst = 0.0;
  const TimeGrid& tg = g.time_grid();
  for (int it = 0; it < tg.n_nodes(); ++it) {
    for (int k = 0; k < 8; ++k) {
      Vec q1(g.base_dim()), q2(g.base_dim());
      for (int j = 0; j < g.base_dim(); ++j) {
        const AxisSpec& ax = g.q_grid().axis(j);
        q1(j) = U(rng) * std::min(std::abs(ax.lo), std::abs(ax.hi));
        q2(j) = U(rng) * std::min(std::abs(ax.lo), std::abs(ax.hi));
      }
      const double a = U(rng) * 2.0, b = U(rng) * 2.0;
      const double t = tg.node(it);
      const Vec lhs = g.eval(t, (a * q1 + b * q2).eval());
      const Vec rhs = a * g.eval(t, q1) + b * g.eval(t, q2);
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  return worst;
}

}  // namespace

LinearGraphs linear_graphs(const Generator& proc, const SplittingCertificate& cert, const Perturbation& B,
                           const RoughnessOptions& opts) {
  if (!B.B) throw InvalidArgument("perturbation has no matrix function");
  if (!(cert.gamma > 0.0) || std::abs(cert.gamma + cert.rho) > 1e-6 * cert.gamma)
    throw PreconditionFailure("roughness needs an exponential dichotomy (rho = -gamma)");
  const double sup = sampled_sup(B, cert.grid);
  if (sup > B.ell * (1.0 + 1e-12)) throw InvalidArgument("perturbation exceeds its declared bound");
  const PerturbationBound pb = perturbation_bound(cert.gamma, cert.M, B.ell);
  if (!pb.pass) throw PreconditionFailure("perturbation too large: ell >= " + std::to_string(pb.bound));

  const Nonlinearity f{[Bf = B.B](double t, const Vec& u) { return Vec(Bf(t) * u); }, B.ell, true};
  const ConstantsLedger ledger = constants_ledger(cert.M, cert.gamma, cert.rho, B.ell);
  auto spec = [&](int d) {
    GridSpec g = GridSpec::uniform(d, opts.extent, opts.count, opts.step);
    g.threads = opts.threads;
    return g;
  };
  LinearGraphs out{solve_sigma(proc, cert, f, ledger, spec(cert.rank), opts.fixed_point),
                   solve_theta(proc, cert, f, ledger, spec(cert.dim - cert.rank), opts.fixed_point), ledger, 0.0};
  out.superposition_residual = std::max(superposition(out.sigma.field, 11u), superposition(out.theta.field, 12u));
  if (out.superposition_residual > 1e-8)
    throw ContractViolation("linear graphs fail superposition: residual " + std::to_string(out.superposition_residual));
  return out;
}

Vec perturbed_projection(const GraphField& sigma, const GraphField& theta, double t, const Vec& u, double tol_fp,
                         int max_iterations) {
  if (sigma.orientation() != GraphOrientation::over_image || theta.orientation() != GraphOrientation::over_kernel)
    throw InvalidArgument("perturbed_projection needs (Sigma, Theta)");
  const SplitFrame fs = sigma.frames().at(t);
  const SplitFrame ft = theta.frames().at(t);
  Vec v = u;
  double prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int k = 0; k < max_iterations; ++k) {
    const Vec next = u - fs.value * sigma.eval(t, fs.base_coords(v)) - ft.value * theta.eval(t, ft.base_coords(v));
    const double dv = (next - v).norm();
    v = next;
    if (dv <= tol_fp * std::max(1.0, u.norm())) return sigma.lift(t, fs.base_coords(v));
    stalled = dv >= prev ? stalled + 1 : 0;
    if (stalled >= 3) break;
    prev = dv;
  }
  throw ConvergenceFailure("perturbed projection fixed point stalled");
}

Mat perturbed_projection_matrix(const GraphField& sigma, const GraphField& theta, double t, double tol_fp) {
  const int d = sigma.state_dim();
  double scale = std::numeric_limits<double>::infinity();
  for (const GraphField* g : {&sigma, &theta})
    for (const AxisSpec& ax : g->q_grid().axes()) scale = std::min({scale, std::abs(ax.lo), std::abs(ax.hi)});
  // Base coordinates of scale/4 * e_k stay inside the grids for well-conditioned frames.
  scale *= 0.25;
  Mat Q(d, d);
  for (int k = 0; k < d; ++k) Q.col(k) = perturbed_projection(sigma, theta, t, scale * Vec::Unit(d, k), tol_fp) / scale;
  return Q;
}

RoughnessConstants roughness_constants(const ConstantsLedger& L) {
  RoughnessConstants rc;
  rc.kappa = L.kappa_chosen;
  if (!(rc.kappa < 0.5)) throw PreconditionFailure("kappa must stay below 1/2 for the perturbed constants");
  rc.M_ell = L.M * (1.0 + rc.kappa) / (1.0 - 2.0 * rc.kappa);
  rc.gamma_ell = L.gamma - L.ell * L.M * (1.0 + rc.kappa);
  rc.distance_bound = 2.0 * rc.kappa / (1.0 - 2.0 * rc.kappa);
  return rc;
}

SplittingCertificate PerturbedDichotomy::as_certificate(int rank) const {
  SplittingCertificate c;
  c.grid = grid;
  c.projections = Q_ell_nodes;
  c.M = M_ell;
  c.gamma = gamma_ell;
  c.rho = -gamma_ell;
  c.rank = rank;
  c.dim = Q_ell_nodes.empty() ? 0 : static_cast<int>(Q_ell_nodes.front().rows());
  return c;
}

PerturbedDichotomy certify_perturbed(const Generator& proc, const SplittingCertificate& cert, const Perturbation& B,
                                     const LinearGraphs& graphs, int samples, const VerifyOptions& opts) {
  PerturbedDichotomy pd;
  pd.grid = cert.grid;
  pd.ell = B.ell;
  pd.ell_bound = perturbation_bound(cert.gamma, cert.M, B.ell).bound;
  pd.thin_margin = B.ell >= 0.95 * pd.ell_bound;
  const RoughnessConstants rc = roughness_constants(graphs.ledger);
  pd.kappa_ell = rc.kappa;
  pd.M_ell = rc.M_ell;
  pd.gamma_ell = rc.gamma_ell;
  pd.distance_bound = rc.distance_bound;
  for (int i = 0; i < cert.grid.n_nodes(); ++i) {
    const double t = cert.grid.node(i);
    Mat Q = perturbed_projection_matrix(graphs.sigma.field, graphs.theta.field, t);
    pd.distance = std::max(pd.distance, op_norm(Q - cert.projections[i]));
    pd.idempotency = std::max(pd.idempotency, op_norm(Q * Q - Q));
    pd.Q_ell_nodes.push_back(std::move(Q));
  }
  pd.report = verify_splitting(proc.perturbed(B.B), pd.as_certificate(cert.rank), samples, opts);
  pd.pass = pd.report.pass && pd.distance <= pd.distance_bound + opts.tol && pd.idempotency <= opts.tol;
  return pd;
}

}  // namespace invman
