#include "invman/pde/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "invman/core/errors.hpp"
#include "invman/core/propagate.hpp"

namespace invman {

std::string to_string(InvariantLine l) { return l == InvariantLine::E1 ? "E1" : "E2"; }

namespace {

// z' = c z - beta(t) z^3 with c = 1 on E1 and 1 - 2a on E2.
Trajectory scalar_solve(const BetaFunction& beta, double c, double seed, double from, double to, double step) {
  auto rhs = [&beta, c](double t, const Vec& z) {
    Vec out(1);
    out(0) = c * z(0) - beta(t) * z(0) * z(0) * z(0);
    return out;
  };
  IntegrateOptions io;
  io.step = step;
  io.ceiling = 1e6;
  Vec z0(1);
  z0(0) = seed;
  return integrate(rhs, from, z0, to, io);
}

}  // namespace

CandidateSet find_hyperbolic_solutions(const ReducedSystem& zs, const HyperbolicOptions& opts) {
  if (zs.variant != ReducedVariant::limiting_z) throw InvalidArgument("need the limiting z-system");
  const LimitingCoefficients& c = zs.coeffs;
  if (std::abs(c.x_star - 0.5) > 1e-14) throw PreconditionFailure("invariant lines need x* = 1/2");
  if (!(opts.horizon > 0.0) || !(opts.pullback_depth > 0.0)) throw InvalidArgument("horizon and depth must be positive");

  CandidateSet out;
  const double a = c.a1;
  const double ratio = c.alpha0 / c.beta0;
  out.in_regime = ratio > 1.0 / 3.0 && ratio < 0.5 && zs.beta.lo >= 1.0 && zs.beta.hi <= 2.0;
  out.comparison_lo = 1.0 / std::sqrt(zs.beta.hi);
  out.comparison_hi = 1.0 / std::sqrt(zs.beta.lo);

  const double H = opts.horizon;
  for (InvariantLine line : {InvariantLine::E1, InvariantLine::E2}) {
    const double growth = line == InvariantLine::E1 ? 1.0 : 1.0 - 2.0 * a;
    const double mirror = line == InvariantLine::E1 ? 1.0 : -1.0;
    for (int sign : {1, -1}) {
      HyperbolicCandidate cand;
      cand.line = line;
      cand.sign = sign;
      cand.expected_unstable = line == InvariantLine::E1 ? 0 : 1;
      double depth = opts.pullback_depth;
      double prev = std::numeric_limits<double>::quiet_NaN();
      double arrival = 0.0;
      for (;;) {
        arrival = scalar_solve(zs.beta, growth, sign * 1.0, -H - depth, -H, opts.step).states().back()(0);
        if (std::isfinite(prev) && std::abs(arrival - prev) <= opts.cauchy_tol) break;
        prev = arrival;
        depth *= 2.0;
        if (depth > opts.max_depth)
          throw ConvergenceFailure("pullback on " + to_string(line) + " did not settle within depth " +
                                   std::to_string(opts.max_depth));
      }
      cand.depth = depth;
      cand.cauchy = std::abs(arrival - prev);
      const Trajectory sc = scalar_solve(zs.beta, growth, arrival, -H, H, opts.step);
      std::vector<Vec> zz, dz;
      zz.reserve(sc.size());
      dz.reserve(sc.size());
      cand.margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < sc.size(); ++i) {
        const double v = sc.state(i)(0);
        Vec p(2);
        p << v, mirror * v;
        zz.push_back(p);
        dz.push_back(zs.field(sc.time(i), p));
        cand.margin = std::min(cand.margin, std::abs(v));
        cand.sup_abs = std::max(cand.sup_abs, std::abs(v));
      }
      cand.z = Trajectory(sc.times(), std::move(zz), std::move(dz));
      if (cand.margin < opts.min_margin)
        throw PreconditionFailure("candidate on " + to_string(line) + " comes within " +
                                  std::to_string(cand.margin) + " of zero");
      out.candidates.push_back(std::move(cand));
    }
  }
  return out;
}

HyperbolicityReport verify_hyperbolicity(const HyperbolicCandidate& cand, const ReducedSystem& zs,
                                         const HyperbolicityOptions& opts) {
  HyperbolicityReport rep;
  const double lo = cand.z.t_lo() + opts.window, hi = cand.z.t_hi() - opts.window;
  if (!(hi > lo)) throw InvalidArgument("candidate is too short for the window");
  auto traj = std::make_shared<const Trajectory>(cand.z);
  auto sys = std::make_shared<const ReducedSystem>(zs);
  const Generator lin(2, [traj, sys](double t) {
    const double tc = std::clamp(t, traj->t_lo(), traj->t_hi());
    return sys->jacobian(tc, traj->at(tc));
  });
  const TimeGrid grid(lo, hi, std::max(1, opts.nodes - 1));
  SplittingOptions so;
  so.window = opts.window;
  try {
    rep.cert = estimate_splitting(lin, cand.expected_unstable, grid, so);
  } catch (const DegenerateGap& e) {
    rep.degenerate = true;
    rep.note = e.what();
    return rep;
  }
  rep.verification = verify_splitting(lin, rep.cert, opts.samples, opts.verify);
  rep.rate_margin = std::min(rep.cert.gamma, -rep.cert.rho);
  rep.pass = rep.verification.pass && rep.rate_margin >= opts.min_rate;
  return rep;
}

}  // namespace invman
