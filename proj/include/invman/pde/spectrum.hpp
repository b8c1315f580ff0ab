#pragma once

#include <vector>

#include "invman/core/linalg.hpp"
#include "invman/pde/diffusion.hpp"

namespace invman {

struct MeshOptions {
  int points = 512;
  int valley_points = 128;  ///< vertices in x* +- 1.25 nu beta_nu (localized shape)
};

/// Vertex-centred finite volumes for -(a u')' with Neumann conditions:
/// (K u)_i = c_{i-1/2}(u_i - u_{i-1}) + c_{i+1/2}(u_i - u_{i+1}), mass W = diag(w).
struct Discretization {
  std::vector<double> x;            ///< vertices, x_0 = 0, x_{N-1} = 1
  std::vector<double> w;            ///< control-volume lengths, sum 1
  std::vector<double> conductance;  ///< 1 / int_{x_i}^{x_{i+1}} dx / a
  int size() const { return static_cast<int>(x.size()); }
  int valley_vertices = 0;
};

Discretization discretize(const DiffusionProfile& profile, const MeshOptions& opts = {});

struct Spectrum {
  Discretization disc;
  std::vector<double> lambdas;  ///< ascending, lambdas[0] = 0
  std::vector<Vec> phis;        ///< sum_i w_i phi_j phi_k = delta_jk, phi_k(1) > 0
  double orthonormality = 0.0;  ///< max |Phi^T W Phi - I|
  double residual = 0.0;        ///< componentwise backward error of the eigenpairs
  int iterations = 0;
};

struct EigenOptions {
  MeshOptions mesh;
  int max_iterations = 2000;
  double tol = 1e-13;           ///< relative change of Ritz values
  double residual_tol = 1e-10;  ///< componentwise backward error
  unsigned seed = 7u;
  int min_valley_vertices = 32;
};

/// Lowest n_modes eigenpairs. lambda_1 = 0 with phi_1 = 1 exactly; the rest by
/// subspace iteration with the exact inverse of K on mean-free vectors.
Spectrum eigensolve(const DiffusionProfile& profile, int n_modes, const EigenOptions& opts = {});

}  // namespace invman
