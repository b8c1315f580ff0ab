#include "invman/graph/solver.hpp"

#include <algorithm>
#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/core/parallel.hpp"
#include "invman/core/propagate.hpp"

namespace invman {

GridSpec GridSpec::uniform(int dim, double extent, int count, double step) {
  GridSpec g;
  g.axes.assign(dim, AxisSpec{-extent, extent, count});
  g.step = step;
  return g;
}

namespace {

/// Times outside the graph window are clamped: the problem is extended
/// constantly in time beyond the window.
class Clamped {
 public:
  Clamped(const GraphField& field, const Generator& proc, const Nonlinearity& f)
      : field_(field), proc_(proc), f_(f), lo_(field.time_grid().t_min()), hi_(field.time_grid().t_max()) {}

  double clamp(double s) const { return std::clamp(s, lo_, hi_); }

  Vec linear(double s, const Vec& x) const { return proc_.apply_linear(clamp(s), x); }

  /// f at the graph point over the base component of x.
  Vec forcing(double s, const Vec& x, const SplitFrame& fr, Vec& scratch) const {
    field_.eval_into(clamp(s), fr.base_coords(x), Extent::clamp, scratch);
    return f_.eval(clamp(s), x + fr.value * scratch);
  }

  const SplitFrame& frame(double s, SplitFrame& scratch) const { return field_.frames().at(clamp(s), scratch); }

 private:
  const GraphField& field_;
  const Generator& proc_;
  const Nonlinearity& f_;
  double lo_, hi_;
};

Vec transform_node(const GraphField& cur, const Clamped& env, int it, int iq, double horizon, double step) {
  const int m = cur.value_dim();
  const Vec a = cur.q_grid().node(iq);
  if (a.isZero(0.0)) return Vec::Zero(m);
  const double tau = cur.time_grid().node(it);
  const double sgn = cur.orientation() == GraphOrientation::over_image ? -1.0 : 1.0;
  int n = 2 * static_cast<int>(std::ceil(horizon / (2.0 * step) - 1e-9));
  n = std::max(n, 2);
  const double h = horizon / n;

  SplitFrame s1, s2;
  Vec scratch(m);
  auto base_field = [&](double s, const Vec& x) -> Vec {
    const SplitFrame& fr = env.frame(s, s1);
    const Vec g = env.forcing(s, x, fr, scratch);
    return env.linear(s, x) + fr.base * fr.base_coords(g);
  };

  std::vector<Vec> xs(n + 1);
  xs[0] = cur.frames().at(tau, s2).base * a;
  for (int j = 0; j < n; ++j) {
    const double s = tau + sgn * j * h;
    Vec x = rk4_step(base_field, s, xs[j], sgn * h);
    const SplitFrame& fr = env.frame(tau + sgn * (j + 1) * h, s2);
    xs[j + 1] = fr.base * fr.base_coords(x);
  }
  std::vector<Vec> gs(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double s = tau + sgn * j * h;
    const SplitFrame& fr = env.frame(s, s1);
    const Vec g = env.forcing(s, xs[j], fr, scratch);
    gs[j] = fr.value * fr.value_coords(g);
  }
  // Value part integrated from the far end back to tau with step 2h, using the
  // stored nodes as RK4 stage points.
  Vec y = Vec::Zero(cur.state_dim());
  const double H = -sgn * 2.0 * h;
  for (int j = n; j >= 2; j -= 2) {
    const double s0 = tau + sgn * j * h;
    const double sm = tau + sgn * (j - 1) * h;
    const double se = tau + sgn * (j - 2) * h;
    const Vec k1 = env.linear(s0, y) + gs[j];
    const Vec k2 = env.linear(sm, y + 0.5 * H * k1) + gs[j - 1];
    const Vec k3 = env.linear(sm, y + 0.5 * H * k2) + gs[j - 1];
    const Vec k4 = env.linear(se, y + H * k3) + gs[j - 2];
    y += (H / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const SplitFrame& fr = env.frame(se, s2);
    y = fr.value * fr.value_coords(y);
  }
  return cur.frames().node(it).value_coords(y);
}

void check_inputs(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                  const ConstantsLedger& ledger, const GridSpec& grid) {
  if (proc.dim() != cert.dim) throw InvalidArgument("certificate and process dimensions differ");
  if (!f.eval) throw InvalidArgument("nonlinearity has no evaluator");
  if (!f.zero_at_origin) throw PreconditionFailure("graph transform needs f(t,0) = 0");
  const GapCheck gap = gap_condition(cert.M, cert.gamma, cert.rho, f.lipschitz);
  if (!gap.pass)
    throw PreconditionFailure("gap condition fails for ell=" + std::to_string(f.lipschitz) + ": ratio " +
                              std::to_string(gap.ratio) + " <= " + std::to_string(gap.threshold));
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  if (!same(ledger.M, cert.M) || !same(ledger.gamma, cert.gamma) || !same(ledger.rho, cert.rho))
    throw InvalidArgument("ledger constants do not belong to the certificate");
  if (ledger.ell < f.lipschitz * (1.0 - 1e-12)) throw InvalidArgument("ledger ell is below the nonlinearity's ell");
  if (!(grid.step > 0.0) || !(grid.tol_tail > 0.0) || !(grid.grid_slack >= 0.0))
    throw InvalidArgument("grid spec needs positive step and tolerances");
}

GraphSolution solve(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                    const ConstantsLedger& ledger, const GridSpec& grid, const FixedPointOptions& opts,
                    GraphOrientation orientation) {
  check_inputs(proc, cert, f, ledger, grid);
  const int base_dim = orientation == GraphOrientation::over_image ? cert.rank : cert.dim - cert.rank;
  if (base_dim < 1 || base_dim == cert.dim) throw PreconditionFailure("graph needs a proper splitting");
  if (static_cast<int>(grid.axes.size()) != base_dim) throw InvalidArgument("grid spec has wrong number of axes");
  if (!(opts.tol_fp > 0.0)) throw InvalidArgument("fixed-point tolerance must be positive");

  FixedPointStats stats;
  stats.horizon = opts.horizon ? *opts.horizon : ledger.tail_horizon(grid.tol_tail);
  stats.nu_bound = ledger.nu;
  if (!(stats.horizon > 0.0)) throw InvalidArgument("horizon must be positive");

  SplitFrames frames(cert.grid, cert.projections, orientation);
  GraphField cur(frames, QGrid(grid.axes), ledger.kappa_chosen, grid.grid_slack);
  int rising = 0;
  bool converged = false;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    GraphField next = graph_transform(cur, proc, f, stats.horizon, grid.step, grid.threads);
    const double inc = graph_distance(next, cur);
    cur = std::move(next);
    stats.increments.push_back(inc);
    stats.iterations = k;
    const std::size_t n = stats.increments.size();
    if (n >= 2) {
      const double prev = stats.increments[n - 2];
      if (prev > 0.0) stats.contraction_estimate = std::max(stats.contraction_estimate, inc / prev);
      rising = inc > prev ? rising + 1 : 0;
    }
    if (inc <= opts.tol_fp) {
      converged = true;
      break;
    }
    if (rising >= 3)
      throw ContractionFailure("graph transform increments rose for 3 consecutive iterations (measured factor " +
                                   std::to_string(inc / stats.increments[n - 2]) + ", bound " +
                                   std::to_string(ledger.nu) + ")",
                               inc / stats.increments[n - 2], ledger.nu);
  }
  if (!converged)
    throw ConvergenceFailure("graph transform did not reach tol_fp in " + std::to_string(opts.max_iterations) +
                             " iterations");
  stats.lipschitz = cur.lipschitz_estimate();
  if (opts.check_lipschitz && stats.lipschitz > ledger.kappa_chosen * (1.0 + grid.grid_slack))
    throw ContractViolation("graph Lipschitz estimate " + std::to_string(stats.lipschitz) + " exceeds kappa " +
                            std::to_string(ledger.kappa_chosen) + " with slack");
  cur.provenance = ledger.entries();
  cur.provenance.emplace_back("horizon", stats.horizon);
  cur.provenance.emplace_back("iterations", stats.iterations);
  return GraphSolution{std::move(cur), std::move(stats)};
}

}  // namespace

GraphField graph_transform(const GraphField& current, const Generator& proc, const Nonlinearity& f, double horizon,
                           double step, int threads) {
  GraphField next = current;
  const Clamped env(current, proc, f);
  const int nq = current.q_grid().size();
  const int total = current.time_grid().n_nodes() * nq;
  std::vector<Vec> out(total);
  parallel_for(total, threads, [&](int k) { out[k] = transform_node(current, env, k / nq, k % nq, horizon, step); });
  for (int k = 0; k < total; ++k) next.set_node_value(k / nq, k % nq, out[k]);
  return next;
}

double graph_distance(const GraphField& a, const GraphField& b) {
  if (a.values().size() != b.values().size()) throw InvalidArgument("graphs live on different grids");
  double worst = 0.0;
  for (int it = 0; it < a.time_grid().n_nodes(); ++it) {
    for (int q = 0; q < a.q_grid().size(); ++q) {
      const double eta = a.q_grid().node(q).norm();
      if (eta == 0.0) continue;
      worst = std::max(worst, (a.node_value(it, q) - b.node_value(it, q)).norm() / eta);
    }
  }
  return worst;
}

GraphSolution solve_sigma(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                          const ConstantsLedger& ledger, const GridSpec& grid, const FixedPointOptions& opts) {
  return solve(proc, cert, f, ledger, grid, opts, GraphOrientation::over_image);
}

GraphSolution solve_theta(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                          const ConstantsLedger& ledger, const GridSpec& grid, const FixedPointOptions& opts) {
  return solve(proc, cert, f, ledger, grid, opts, GraphOrientation::over_kernel);
}

InvarianceReport graph_invariance(const GraphField& field, const Generator& proc, const Nonlinearity& f,
                                  int max_steps, double step, int stride) {
  InvarianceReport rep;
  const Generator full = proc.linear_only().with_nonlinearity(f);
  auto rhs = [&full](double t, const Vec& u) { return full.field(t, u); };
  const TimeGrid& tg = field.time_grid();
  stride = std::max(1, stride);
  for (int it = 0; it < tg.n_nodes(); ++it) {
    const double tau = tg.node(it);
    for (int q = 0; q < field.q_grid().size(); q += stride) {
      Vec u = field.lift(tau, field.q_grid().node(q));
      for (int k = 1; k <= max_steps; ++k) {
        const double s = tau + k * step;
        u = rk4_step(rhs, s - step, u, step);
        if (!tg.contains(s)) {
          ++rep.skipped;
          break;
        }
        const SplitFrame fr = field.frames().at(s);
        const Vec a = fr.base_coords(u);
        if (!field.q_grid().contains(a)) {
          ++rep.skipped;
          break;
        }
        const double r = (fr.value_coords(u) - field.eval(s, a)).norm();
        rep.max_residual = std::max(rep.max_residual, r);
        ++rep.samples;
      }
    }
  }
  return rep;
}

Trajectory manifold_flow(const GraphField& field, const Generator& proc, const Nonlinearity& f, double t0,
                         const Vec& a0, double t1, double step, Extent ext) {
  const SplitFrames& frames = field.frames();
  const int m = field.value_dim();
  const double lo = field.time_grid().t_min(), hi = field.time_grid().t_max();
  auto ct = [&](double s) { return ext == Extent::strict ? s : std::clamp(s, lo, hi); };
  auto rhs = [&](double s, const Vec& x) -> Vec {
    SplitFrame scratch;
    const SplitFrame& fr = frames.at(ct(s), scratch);
    Vec v(m);
    field.eval_into(ct(s), fr.base_coords(x), ext, v);
    const Vec g = f.eval(ct(s), x + fr.value * v);
    return proc.apply_linear(ct(s), x) + fr.base * fr.base_coords(g);
  };
  IntegrateOptions io;
  io.step = step;
  io.ceiling = std::numeric_limits<double>::infinity();
  io.projection = [&](double s) {
    SplitFrame scratch;
    return frames.at(ct(s), scratch).base_projection();
  };
  const Vec x0 = frames.at(ct(t0)).base * a0;
  Trajectory tr = integrate(rhs, t0, x0, t1, io);
  std::vector<Vec> coords, rates;
  coords.reserve(tr.size());
  rates.reserve(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const SplitFrame fr = frames.at(ct(tr.time(i)));
    coords.push_back(fr.base_coords(tr.state(i)));
    rates.push_back(fr.base_coords(tr.derivatives()[i]));
  }
  return Trajectory(tr.times(), std::move(coords), std::move(rates));
}

Vec project_sigma(const GraphField& sigma, double t, const Vec& u) {
  if (sigma.orientation() != GraphOrientation::over_image) throw InvalidArgument("field is not a graph over Im Q");
  return sigma.project(t, u);
}

Vec project_theta(const GraphField& theta, double t, const Vec& u) {
  if (theta.orientation() != GraphOrientation::over_kernel) throw InvalidArgument("field is not a graph over Ker Q");
  return theta.project(t, u);
}

}  // namespace invman
