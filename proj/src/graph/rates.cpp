#include "invman/graph/rates.hpp"

#include <algorithm>
#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/core/linalg.hpp"
#include "invman/core/propagate.hpp"

namespace invman {

namespace {

constexpr double kFloor = 1e-13;

VectorField full_field(const Generator& proc, const Nonlinearity& f) {
  const Generator full = proc.linear_only().with_nonlinearity(f);
  return [full](double t, const Vec& u) { return full.field(t, u); };
}

/// Vertical distance to the graph, or NaN once the base coordinates leave the grid.
double vertical_distance(const GraphField& field, double t, const Vec& u) {
  const SplitFrame fr = field.frames().at(std::clamp(t, field.time_grid().t_min(), field.time_grid().t_max()));
  const Vec a = fr.base_coords(u);
  if (!field.q_grid().contains(a)) return std::numeric_limits<double>::quiet_NaN();
  return (fr.value_coords(u) - field.eval(t, a, Extent::clamp_time)).norm();
}

/// Unit vector along the value directions at time t.
Vec value_direction(const GraphField& field, double t) {
  const SplitFrame fr = field.frames().at(std::clamp(t, field.time_grid().t_min(), field.time_grid().t_max()));
  Vec v = fr.value * Vec::Ones(fr.value_dim());
  return v / v.norm();
}

double extent_scale(const GraphField& field) {
  double s = 0.0;
  for (const AxisSpec& ax : field.q_grid().axes()) s = std::max({s, std::abs(ax.lo), std::abs(ax.hi)});
  return s;
}

/// Slope of log y against x over the entries with y above the floor.
std::optional<double> log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> xs, ls;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > kFloor) || !std::isfinite(y[i])) continue;
    xs.push_back(x[i]);
    ls.push_back(std::log(y[i]));
  }
  if (xs.size() < 5) return std::nullopt;
  return fit_slope(xs, ls);
}

/// Off-graph flight: distances to the graph until exit, blow-up past `cap` or the horizon.
std::optional<double> flight_slope(const GraphField& field, const VectorField& rhs, const RateSample& s,
                                   const RateOptions& opts, double cap) {
  Vec u = field.lift(s.tau, s.base, Extent::clamp_time) + opts.offset * extent_scale(field) * value_direction(field, s.tau);
  std::vector<double> ts, ds;
  const int n = step_count(opts.horizon, opts.step);
  const double h = opts.horizon / n;
  for (int k = 0; k <= n; ++k) {
    const double t = s.tau + k * h;
    if (k > 0) u = rk4_step(rhs, t - h, u, h);
    const double d = vertical_distance(field, t, u);
    if (!std::isfinite(d) || d > cap) break;
    ts.push_back(t);
    ds.push_back(d);
  }
  return log_slope(ts, ds);
}

void add(RatesReport& rep, std::string name, std::string relation, double bound, double measured, double tol) {
  RateCheck c{std::move(name), std::move(relation), bound, measured, false};
  c.pass = c.relation == "<=" ? measured <= bound + tol : measured >= bound - tol;
  rep.pass = rep.pass && c.pass;
  rep.checks.push_back(std::move(c));
}

}  // namespace

RatesReport verify_rates(const GraphField& field, const Generator& proc, const Nonlinearity& f,
                         const ConstantsLedger& ledger, const std::vector<RateSample>& samples,
                         const RateOptions& opts) {
  if (samples.empty()) throw InvalidArgument("verify_rates needs samples");
  if (!(opts.horizon > 0.0 && opts.step > 0.0)) throw InvalidArgument("horizon and step must be positive");
  RatesReport rep;
  const VectorField rhs = full_field(proc, f);
  const double inf = std::numeric_limits<double>::infinity();

  if (field.orientation() == GraphOrientation::over_image) {
    double growth = -inf, decay = inf;
    for (const RateSample& s : samples) {
      const Trajectory q = manifold_flow(field, proc, f, s.tau, s.base, s.tau - opts.horizon, opts.step);
      std::vector<double> back, norms;
      for (std::size_t i = 0; i < q.size(); ++i) {
        back.push_back(s.tau - q.time(i));
        norms.push_back(q.state(i).norm());
      }
      if (auto g = log_slope(back, norms)) growth = std::max(growth, *g);
      if (auto sl = flight_slope(field, rhs, s, opts, inf)) decay = std::min(decay, -*sl);
    }
    add(rep, "manifold_backward_growth", "<=", ledger.manifold_growth(), growth, opts.tol);
    add(rep, "off_manifold_decay", ">=", ledger.delta, decay, opts.tol);
  } else {
    double decay = inf, separation = inf;
    for (const RateSample& s : samples) {
      const Trajectory p = manifold_flow(field, proc, f, s.tau, s.base, s.tau + opts.horizon, opts.step);
      std::vector<double> ts, norms;
      for (std::size_t i = 0; i < p.size(); ++i) {
        ts.push_back(p.time(i));
        norms.push_back(p.state(i).norm());
      }
      if (auto sl = log_slope(ts, norms)) decay = std::min(decay, -*sl);
      const double cap = 100.0 * opts.offset * extent_scale(field);
      if (auto sl = flight_slope(field, rhs, s, opts, cap)) separation = std::min(separation, *sl);
    }
    add(rep, "stable_decay", ">=", ledger.stable_decay(), decay, opts.tol);
    add(rep, "stable_separation", ">=", -ledger.delta_hat, separation, opts.tol);
  }
  for (const RateCheck& c : rep.checks)
    if (!std::isfinite(c.measured)) rep.pass = false;
  return rep;
}

PhaseResult asymptotic_phase(const GraphField& sigma, const Generator& proc, const Nonlinearity& f,
                             const ConstantsLedger& ledger, const Vec& u0, double tau, double horizon,
                             const PhaseOptions& opts) {
  if (sigma.orientation() != GraphOrientation::over_image) throw InvalidArgument("asymptotic phase needs Sigma");
  if (!(ledger.delta > 0.0)) throw PreconditionFailure("attraction rate delta is not positive");
  if (horizon < 5.0 / ledger.delta * (1.0 - 1e-12)) throw InvalidArgument("horizon must be at least 5/delta");
  if (opts.pullbacks < 2) throw InvalidArgument("need at least two pullbacks");
  if (u0.size() != sigma.state_dim()) throw InvalidArgument("initial state has wrong dimension");

  PhaseResult res;
  res.delta = ledger.delta;
  IntegrateOptions io;
  io.step = opts.step;
  io.ceiling = std::numeric_limits<double>::infinity();
  res.solution = integrate(full_field(proc, f), tau, u0, tau + horizon + opts.extra, io);

  const TimeGrid& tg = sigma.time_grid();
  auto base_at = [&](double t, const Vec& u) { return sigma.frames().at(std::clamp(t, tg.t_min(), tg.t_max())).base_coords(u); };
  Vec prev, last;
  for (int n = 0; n < opts.pullbacks; ++n) {
    const double tn = tau + horizon + opts.extra * n / (opts.pullbacks - 1);
    Trajectory q = manifold_flow(sigma, proc, f, tn, base_at(tn, res.solution.at(tn)), tau, opts.step, opts.extent);
    prev = last;
    last = q.states().back();
    if (n == opts.pullbacks - 1) res.shadow = std::move(q);
  }
  res.cauchy = (last - prev).norm() / std::max(u0.norm(), 1e-300);
  if (res.cauchy > opts.cauchy_tol)
    throw ConvergenceFailure("pullback sequence not Cauchy: " + std::to_string(res.cauchy));

  for (std::size_t i = 0; i < res.solution.size(); ++i) {
    const double t = res.solution.time(i);
    if (t > tau + horizon + 1e-12) break;
    const Vec on = sigma.lift(t, res.shadow.at(t), opts.extent);
    res.times.push_back(t);
    res.distances.push_back((res.solution.state(i) - on).norm());
  }
  // Distances at the integration noise level count as zero.
  std::vector<double> ft, fd;
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    if (res.distances[i] <= 1e-9 * std::max(1.0, res.solution.at(res.times[i]).norm())) continue;
    ft.push_back(res.times[i]);
    fd.push_back(res.distances[i]);
  }
  if (ft.empty()) {
    res.fitted_rate = std::numeric_limits<double>::infinity();
  } else {
    const auto sl = log_slope(ft, fd);
    res.fitted_rate = sl ? -*sl : 0.0;
  }
  res.pass = res.fitted_rate >= (1.0 - opts.rate_tol) * ledger.delta;
  return res;
}

SaddlePair saddle_point(const Generator& proc, const SplittingCertificate& cert, const Nonlinearity& f,
                        const ConstantsLedger& ledger, const GridSpec& unstable_grid, const GridSpec& stable_grid,
                        const FixedPointOptions& opts) {
  if (!(cert.gamma > 0.0) || std::abs(cert.gamma + cert.rho) > 1e-6 * cert.gamma)
    throw PreconditionFailure("saddle point needs a dichotomy with rho = -gamma");
  if (!(ledger.delta > 0.0)) throw PreconditionFailure("ell too large: delta is not positive");
  SaddlePair out{solve_sigma(proc, cert, f, ledger, unstable_grid, opts),
                 solve_theta(proc, cert, f, ledger, stable_grid, opts)};
  return out;
}

}  // namespace invman
