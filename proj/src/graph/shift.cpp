#include "invman/graph/shift.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "invman/core/errors.hpp"
#include "invman/core/propagate.hpp"
#include "invman/graph/cutoff.hpp"

namespace invman {

Generator shift_to_solution(const Generator& gen, const Trajectory& u_star, const ShiftOptions& opts) {
  if (u_star.dim() != gen.dim()) throw InvalidArgument("trajectory dimension does not match generator");
  if (u_star.size() < 2) throw InvalidArgument("trajectory needs at least two samples");
  if (u_star.time(1) < u_star.time(0)) throw InvalidArgument("trajectory times must increase");

  auto field = [&gen](double t, const Vec& u) { return gen.field(t, u); };
  IntegrateOptions io;
  io.step = opts.step;
  io.record = false;
  io.ceiling = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < u_star.size(); ++i) {
    const Vec next = integrate(field, u_star.time(i), u_star.state(i), u_star.time(i + 1), io).states().back();
    const double err = (next - u_star.state(i + 1)).norm() / (1.0 + u_star.state(i + 1).norm());
    if (!(err <= opts.residual_tol))
      throw PreconditionFailure("u_star is not a solution: residual " + std::to_string(err) + " at t=" +
                                std::to_string(u_star.time(i)));
  }
  if (!gen.has_nonlinearity()) return gen;

  const Nonlinearity f = gen.nonlinearity();
  auto traj = std::make_shared<const Trajectory>(u_star);
  // Outside the sampled window the solution is extended constantly in time.
  auto at = [traj](double t) { return traj->at(std::clamp(t, traj->t_lo(), traj->t_hi())); };
  auto B = [at, f](double t) { return fd_jacobian(f.eval, t, at(t)); };

  bool constant = gen.is_autonomous();
  for (std::size_t i = 1; i < u_star.size() && constant; ++i)
    if (!(u_star.state(i) - u_star.state(0)).isZero(0.0)) constant = false;

  double b_sup = 0.0;
  for (std::size_t i = 0; i < u_star.size(); ++i) b_sup = std::max(b_sup, op_norm(B(u_star.time(i))));

  Nonlinearity g;
  g.lipschitz = f.lipschitz + b_sup;
  g.zero_at_origin = true;
  if (constant) {
    const Vec u0 = u_star.state(0);
    const double t0 = u_star.time(0);
    const Mat b0 = B(t0);
    g.eval = [f, u0, b0](double t, const Vec& v) { return (f.eval(t, u0 + v) - f.eval(t, u0) - b0 * v).eval(); };
  } else {
    g.eval = [f, at, B](double t, const Vec& v) {
      const Vec u = at(t);
      return (f.eval(t, u + v) - f.eval(t, u) - B(t) * v).eval();
    };
  }

  Generator shifted = constant ? Generator::autonomous(gen.linear(0.0) + B(u_star.time(0)), g)
                               : gen.linear_only().perturbed(Generator::LinearPart(B)).with_nonlinearity(g);

  for (std::size_t i = 0; i < u_star.size(); ++i) {
    const double t = u_star.time(i);
    const Vec zero = Vec::Zero(gen.dim());
    if (g.eval(t, zero).norm() != 0.0) throw ContractViolation("shifted nonlinearity is nonzero at the origin");
    const double jac = op_norm(fd_jacobian(g.eval, t, zero));
    if (!(jac <= opts.jacobian_tol * (1.0 + op_norm(B(t)))))
      throw ContractViolation("shifted nonlinearity has a nonzero Jacobian at the origin");
  }
  return shifted;
}

}  // namespace invman
