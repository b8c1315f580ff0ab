#pragma once

// Independent reference computations used as test oracles. These deliberately
// avoid the library's own code paths.

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;

/// Spectral projection of a constant matrix onto the `rank` eigenvalues with
/// largest real part (eigenvectors via the general eigensolver).
Mat eigenprojection(const Mat& a, int rank);

/// Deterministic pseudo-random orthogonal matrix.
Mat random_orthogonal(int dim, unsigned seed);

struct Constants {
  double threshold, kappa_minus, kappa_plus, kappa_star, delta, delta_hat, nu;
  double M_ell, gamma_ell, distance_bound, roughness_bound;
  double delta_bar;
};

/// Closed-form constants evaluated term by term (naive root formula).
Constants constants(double M, double gamma, double rho, double ell);

struct ParabolicConstants {
  double kappa_minus, kappa_plus, kappa_star, delta;
};

ParabolicConstants parabolic(double M, double N, double gamma, double rho, double ell, double alpha);

/// Slope of the invariant graph y = c x^2 for x' = x, y' = -y + x^2 (and its mirror).
inline double quadratic_sigma(double x) { return x * x / 3.0; }
inline double quadratic_theta_mirror(double y) { return -y * y / 3.0; }

/// Neumann eigenvalues of -(c u')' on (0,1).
double neumann_eigenvalue(double c, int k);

}  // namespace oracle
