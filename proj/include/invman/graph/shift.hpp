#pragma once

#include "invman/core/generator.hpp"
#include "invman/core/trajectory.hpp"

namespace invman {

struct ShiftOptions {
  double residual_tol = 1e-6;
  double jacobian_tol = 1e-6;
  double step = 1e-3;
};

/// Translates a verified global solution u* to the origin: the new generator
/// has linear part A(t) + f_u(t, u*(t)) and nonlinearity
/// g(t, v) = f(t, u* + v) - f(t, u*) - f_u(t, u*) v.
Generator shift_to_solution(const Generator& gen, const Trajectory& u_star, const ShiftOptions& opts = {});

}  // namespace invman
