#include "invman/fine/nested.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "invman/core/errors.hpp"
#include "invman/core/linalg.hpp"
#include "invman/core/propagate.hpp"

namespace invman {

double delta_bar(const ConstantsLedger& L) {
  const double gap = L.gamma - L.rho;
  const double k = L.kappa_chosen;
  return gap - 2.0 * L.M * L.ell -
         2.0 * L.M * L.M * L.ell * L.ell * (1.0 + k) * (1.0 + L.M) / (gap - L.ell * L.M * (1.0 + k));
}

namespace {

double clamp_time(const GraphField& g, double t) {
  return std::clamp(t, g.time_grid().t_min(), g.time_grid().t_max());
}

ReducedCoordinates reduce(const Generator& proc, const Nonlinearity& f, std::shared_ptr<const GraphField> coarse) {
  const SplitFrames& frames = coarse->frames();
  const int r = coarse->base_dim();
  Generator gen = Generator::autonomous(Mat::Zero(r, r));
  if (proc.is_autonomous() && frames.constant()) {
    const SplitFrame& fr = frames.node(0);
    gen = Generator::autonomous(fr.extract.topRows(r) * proc.linear(0.0) * fr.base);
  } else {
    gen = Generator(r, [proc, coarse, r](double t) -> Mat {
      const double tc = clamp_time(*coarse, t);
      const SplitFrame fr = coarse->frames().at(tc);
      const double h = 1e-4;
      const double lo = clamp_time(*coarse, tc - h), hi = clamp_time(*coarse, tc + h);
      Mat Bdot = Mat::Zero(fr.base.rows(), r);
      if (hi > lo) Bdot = (coarse->frames().at(hi).base - coarse->frames().at(lo).base) / (hi - lo);
      return fr.extract.topRows(r) * (proc.linear(tc) * fr.base - Bdot);
    });
  }
  Nonlinearity g{[coarse, f](double t, const Vec& a) -> Vec {
                   const SplitFrame fr = coarse->frames().at(clamp_time(*coarse, t));
                   return fr.base_coords(f.eval(t, coarse->lift(t, a, Extent::clamp)));
                 },
                 f.lipschitz * (1.0 + coarse->kappa()), true};
  return ReducedCoordinates{gen, g};
}

/// Max vertical distance of W_fast node points to W_coarse (points outside the coarse grid are skipped).
double containment(const GraphField& fast, const GraphField& coarse) {
  double worst = 0.0;
  for (int it = 0; it < fast.time_grid().n_nodes(); ++it) {
    const double t = fast.time_grid().node(it);
    const SplitFrame fr = coarse.frames().at(clamp_time(coarse, t));
    for (int q = 0; q < fast.q_grid().size(); ++q) {
      const Vec u = fast.lift(t, fast.q_grid().node(q));
      const Vec a = fr.base_coords(u);
      if (!coarse.q_grid().contains(a)) continue;
      worst = std::max(worst, (fr.value_coords(u) - coarse.eval(t, a, Extent::clamp_time)).norm());
    }
  }
  return worst;
}

}  // namespace

NestedManifolds build_nested(const Generator& proc, const SplittingCertificate& coarse_cert,
                             const SplittingCertificate& fine_cert, const Nonlinearity& f,
                             const NestedOptions& opts) {
  const NestednessReport nest = nestedness_check(coarse_cert, fine_cert);
  if (!nest.pass) throw PreconditionFailure("certificates are not nested (coarse, fine)");
  const double scale = std::max({1.0, std::abs(coarse_cert.rho), std::abs(fine_cert.gamma)});
  if (coarse_cert.rho < fine_cert.gamma - 1e-6 * scale)
    throw PreconditionFailure("need rho_coarse >= gamma_fine");

  ConstantsLedger coarse_ledger = constants_ledger(coarse_cert.M, coarse_cert.gamma, coarse_cert.rho, f.lipschitz);
  ConstantsLedger fine_ledger = constants_ledger(fine_cert.M, fine_cert.gamma, fine_cert.rho, f.lipschitz);
  const double db = delta_bar(fine_ledger);
  if (!(db > 0.0)) throw PreconditionFailure("delta_bar is not positive");

  GraphSolution coarse = solve_sigma(proc, coarse_cert, f, coarse_ledger, opts.coarse_grid, opts.fixed_point);
  GraphSolution fast = solve_sigma(proc, fine_cert, f, fine_ledger, opts.fast_grid, opts.fixed_point);
  const double contained = containment(fast.field, coarse.field);

  ReducedCoordinates red = reduce(proc, f, std::make_shared<const GraphField>(coarse.field));
  SplittingCertificate rc = estimate_splitting(red.generator, fine_cert.rank, coarse_cert.grid, opts.reduced_splitting);
  ConstantsLedger rl = constants_ledger(rc.M, rc.gamma, rc.rho, red.f.lipschitz);
  GraphSolution slow = solve_theta(red.generator, rc, red.f, rl, opts.slow_grid, opts.fixed_point);

  NestedManifolds out{std::move(coarse), std::move(fast), std::move(slow), std::move(red), std::move(rc),
                      coarse_ledger,     fine_ledger,     rl,              db,             contained};
  return out;
}

}  // namespace invman

namespace invman {

RatioSamples tangency_ratio(const NestedManifolds& nested, const Vec& u0, double t, const std::vector<double>& taus,
                            double step, double tol) {
  const GraphField& C = nested.coarse.field;
  const GraphField& F = nested.fast.field;
  const GraphField& S = nested.slow.field;
  if (u0.size() != C.state_dim()) throw InvalidArgument("initial state has wrong dimension");
  if (taus.empty()) throw InvalidArgument("need at least one pullback time");
  for (std::size_t k = 0; k < taus.size(); ++k)
    if (taus[k] > t || (k > 0 && taus[k] >= taus[k - 1])) throw InvalidArgument("pullback times must decrease from t");

  const SplitFrame fc = C.frames().at(clamp_time(C, t));
  const Vec a0 = fc.base_coords(u0);
  if (!C.q_grid().contains(a0)) throw OutOfDomain("initial state outside the coarse graph extents");
  const double scale = std::max(1.0, u0.norm());
  if ((fc.value_coords(u0) - C.eval(t, a0, Extent::clamp_time)).norm() > tol * scale)
    throw PreconditionFailure("initial state is not on the coarse manifold");

  // Distances to W_fast and W_slow of the point with coarse coordinates a; NaN once outside the grids.
  auto distances = [&](double s, const Vec& a, Vec& u) -> std::pair<double, double> {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!C.q_grid().contains(a)) return {nan, nan};
    u = C.lift(s, a, Extent::clamp_time);
    const SplitFrame ff = F.frames().at(clamp_time(F, s));
    const Vec qf = ff.base_coords(u);
    const SplitFrame fs = S.frames().at(clamp_time(S, s));
    const Vec qs = fs.base_coords(a);
    if (!F.q_grid().contains(qf) || !S.q_grid().contains(qs)) return {nan, nan};
    const double den = (u - F.lift(s, qf, Extent::clamp_time)).norm();
    const Vec on_slow = C.lift(s, S.lift(s, qs, Extent::clamp_time), Extent::clamp_time);
    return {(u - on_slow).norm(), den};
  };

  Vec u;
  const auto [num0, den0] = distances(t, a0, u);
  if (!std::isfinite(den0)) throw OutOfDomain("initial state outside the fine graph extents");
  if (den0 <= tol * scale) throw PreconditionFailure("initial state lies on the fast manifold");

  RatioSamples out;
  out.delta_bar = nested.delta_bar;
  const double r0 = num0 / den0;
  const double M = nested.fine_ledger.M;

  const ReducedCoordinates& red = nested.reduced;
  auto rhs = [&red](double s, const Vec& a) { return Vec(red.generator.apply_linear(s, a) + red.f.eval(s, a)); };
  IntegrateOptions io;
  io.step = step;
  io.ceiling = std::numeric_limits<double>::infinity();
  const Trajectory back = integrate(rhs, t, a0, taus.back(), io);

  auto record = [&](double s, double num, double den) {
    out.taus.push_back(s);
    out.ratios.push_back(num / den);
    const Mat& B = F.frames().at(clamp_time(F, s)).base;
    const Vec along = B * (B.transpose() * u);
    out.angles.push_back(std::atan2((u - along).norm(), along.norm()));
  };
  record(t, num0, den0);
  for (double tau : taus) {
    if (tau == t) continue;
    const auto [num, den] = distances(tau, back.at(tau), u);
    if (!std::isfinite(den) || den <= 1e-15 * u.norm() || den < 1e-300) {
      out.truncated = true;
      break;
    }
    record(tau, num, den);
  }

  out.bound_holds = true;
  for (std::size_t k = 0; k < out.taus.size(); ++k) {
    const double bound = M * M * std::exp(-nested.delta_bar * (t - out.taus[k])) * r0;
    const double q = bound > 0.0 ? out.ratios[k] / bound : (out.ratios[k] > 0.0 ? INFINITY : 0.0);
    out.worst_bound_ratio = std::max(out.worst_bound_ratio, q);
    if (out.ratios[k] > bound * (1.0 + tol)) out.bound_holds = false;
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < out.taus.size(); ++k) {
    if (!(out.ratios[k] > 0.0)) continue;
    x.push_back(out.taus[k]);
    y.push_back(std::log(out.ratios[k]));
  }
  out.fitted_rate = x.size() >= 2 ? fit_slope(x, y) : 0.0;
  const std::size_t half = out.ratios.size() / 2;
  out.eventually_decreasing = out.ratios.size() >= 2;
  for (std::size_t k = std::max<std::size_t>(half, 1); k < out.ratios.size(); ++k)
    if (out.ratios[k] > out.ratios[k - 1]) out.eventually_decreasing = false;
  return out;
}

}  // namespace invman
