#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

Mat eigenprojection(const Mat& a, int rank) {
  Eigen::EigenSolver<Mat> es(a);
  Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::VectorXcd lam = es.eigenvalues();
  const int d = static_cast<int>(a.rows());
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return lam(i).real() > lam(j).real(); });
  Eigen::MatrixXcd sel = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < rank; ++k) sel(order[k], order[k]) = 1.0;
  Eigen::MatrixXcd p = v * sel * v.inverse();
  return p.real();
}

Mat random_orthogonal(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = n(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ();
}

Constants constants(double M, double gamma, double rho, double ell) {
  Constants c{};
  const double a = M * M + 2 * M + std::sqrt(8 * M * M * M);
  const double b = 3 * M * M + 2 * M;
  c.threshold = a > b ? a : b;
  const double x = (gamma - rho) / ell - M * M - 2 * M;
  const double disc = std::sqrt(x * x - 8 * M * M * M);
  c.kappa_minus = (x - disc) / (4 * M);
  c.kappa_plus = (x + disc) / (4 * M);
  c.kappa_star = (gamma - rho) / (2 * M * ell) - M - 1;
  const double k = c.kappa_minus;
  const double tail = M * M * ell * ell * (1 + k) * (1 + M) / (gamma - rho - ell * M * (1 + k));
  c.delta = gamma - M * ell - tail;
  c.delta_hat = rho + M * ell + tail;
  c.nu = 2 * ell * M * M / (gamma - rho - 2 * ell * M * (1 + k));
  c.M_ell = M * (1 + k) / (1 - 2 * k);
  c.gamma_ell = gamma - ell * M * (1 + k);
  c.distance_bound = 2 * k / (1 - 2 * k);
  c.roughness_bound = 2 * gamma / (3 * M * (M + 1));
  c.delta_bar = gamma - rho - 2 * M * ell - 2 * tail;
  return c;
}

ParabolicConstants parabolic(double M, double N, double gamma, double rho, double ell, double alpha) {
  ParabolicConstants p{};
  const double g = std::tgamma(1 - alpha);
  const double e = 1.0 / (1 - alpha);
  const double w = std::pow(2 * M * M * ell * g, e);
  p.kappa_star = (gamma - rho - w) / (2 * N * ell) - 1;
  p.kappa_plus = 0.5 * (gamma - rho - w) / (2 * N * ell) - 1;
  p.kappa_minus = std::pow(2.0, 1 - alpha) * M * M * ell * g / std::pow(gamma - rho + w, 1 - alpha);
  const double k = p.kappa_minus;
  const double inner = 1 + ell * (1 + 2 * M) * N * (1 + k) / (gamma - rho - 2 * ell * N * (1 + k));
  p.delta = gamma - rho - 2 * N * ell * (1 + k) - std::pow(2 * g * ell * M * inner, e);
  return p;
}

double neumann_eigenvalue(double c, int k) { return c * std::pow((k - 1) * M_PI, 2); }

}  // namespace oracle
