#pragma once

#include <vector>

#include "invman/core/generator.hpp"

namespace invman {

/// C^2 ramp: 1 for s <= 0, 0 for s >= 1.
double smooth_ramp(double s);

struct CutoffOptions {
  double inflation = 0.10;
  std::vector<double> sample_times{0.0};
  unsigned seed = 99u;
};

/// f_cut(t, u) = psi(|u|) f(t, r_R(u)), where r_R is the radial retraction onto
/// the closed ball of radius R and psi ramps from 1 at R to 0 at R + w. Equals f
/// on the ball and vanishes beyond R + w.
class CutoffNonlinearity {
 public:
  CutoffNonlinearity(Nonlinearity base, int dim, double radius, double ramp_width, double effective_ell);

  Vec operator()(double t, const Vec& u) const;

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double ramp_width() const { return ramp_; }
  double effective_ell() const { return ell_; }
  const Nonlinearity& base() const { return base_; }
  Nonlinearity as_nonlinearity() const;

 private:
  Nonlinearity base_;
  int dim_;
  double radius_;
  double ramp_;
  double ell_;
};

/// Builds the cut-off and estimates its global Lipschitz constant as the
/// largest Jacobian norm over sample shells, inflated by `inflation`.
CutoffNonlinearity cutoff(const Nonlinearity& f, int dim, double radius, double ramp_width,
                          const CutoffOptions& opts = {});

/// Central-difference Jacobian with step 1e-5 (1 + |u|).
Mat fd_jacobian(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& u);

/// Largest sampled Jacobian norm of f on shells of the given radii.
double sampled_lipschitz(const std::function<Vec(double, const Vec&)>& f, int dim, const std::vector<double>& radii,
                         const std::vector<double>& times, unsigned seed);

}  // namespace invman
