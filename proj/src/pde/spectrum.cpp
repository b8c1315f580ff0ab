#include "invman/pde/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "invman/core/errors.hpp"

namespace invman {

namespace {

void append_uniform(std::vector<double>& x, double a, double b, int segments) {
  segments = std::max(segments, 1);
  for (int k = 1; k <= segments; ++k) x.push_back(k == segments ? b : a + (b - a) * k / segments);
}

/// 1 / int_a^b dx / f(x) by 5-point Gauss-Legendre.
double conductance(const DiffusionProfile& a, double lo, double hi) {
  static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                               0.2369268850561891};
  const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  double r = 0.0;
  for (int k = 0; k < 5; ++k) r += ws[k] / a(m + h * xs[k]);
  return 1.0 / (h * r);
}

/// Solves K phi = W r for W-mean-free r; returns the W-mean-free solution.
Vec green(const Discretization& d, const Vec& r) {
  const int n = d.size();
  Vec phi(n);
  phi(0) = 0.0;
  double flux = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    flux += d.w[i] * r(i);
    phi(i + 1) = phi(i) - flux / d.conductance[i];
  }
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += d.w[i] * phi(i);
  return (phi.array() - mean).matrix();
}

Vec apply_k(const Discretization& d, const Vec& u) {
  const int n = d.size();
  Vec out = Vec::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const double f = d.conductance[i] * (u(i) - u(i + 1));
    out(i) += f;
    out(i + 1) -= f;
  }
  return out;
}

/// Componentwise backward error max_i |K phi - lambda W phi|_i / (|K||phi| + lambda W |phi|)_i.
double mode_residual(const Discretization& d, const Vec& phi, double lambda) {
  const int n = d.size();
  const Vec r = apply_k(d, phi);
  Vec scale = Vec::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const double s = d.conductance[i] * (std::abs(phi(i)) + std::abs(phi(i + 1)));
    scale(i) += s;
    scale(i + 1) += s;
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wp = lambda * d.w[i] * phi(i);
    const double den = scale(i) + std::abs(wp);
    if (den > 0.0) worst = std::max(worst, std::abs(r(i) - wp) / den);
  }
  return worst;
}

void remove_mean(const Discretization& d, Mat& X) {
  const Eigen::Map<const Vec> w(d.w.data(), d.size());
  for (int j = 0; j < X.cols(); ++j) X.col(j).array() -= w.dot(X.col(j));
}

/// W-orthonormalizes the columns (Cholesky QR, twice).
void w_orthonormalize(const Discretization& d, Mat& X) {
  const Eigen::Map<const Vec> w(d.w.data(), d.size());
  for (int pass = 0; pass < 2; ++pass) {
    const Mat G = X.transpose() * w.asDiagonal() * X;
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success) throw ConvergenceFailure("subspace basis lost rank");
    X = llt.matrixU().solve<Eigen::OnTheRight>(X);
  }
}

}  // namespace

Discretization discretize(const DiffusionProfile& profile, const MeshOptions& opts) {
  if (opts.points < 8) throw InvalidArgument("mesh needs at least 8 points");
  Discretization d;
  std::vector<double>& x = d.x;
  x.push_back(0.0);
  if (profile.shape() == ProfileShape::constant) {
    append_uniform(x, 0.0, 1.0, opts.points - 1);
  } else {
    const double xs = profile.x_star();
    const double o = profile.nu() * profile.beta_nu(), i = profile.nu() * profile.params().beta0;
    const double zone = std::min(1.25 * o, 0.5 * (o + std::min(xs, 1.0 - xs)));
    const std::vector<double> fine{xs - zone, xs - o, xs - i, xs + i, xs + o, xs + zone};
    const int fine_segments = std::max(opts.valley_points, 5 * 8);
    const int coarse_segments = std::max(opts.points - 1 - fine_segments, 2);
    const double left = fine.front(), right = 1.0 - fine.back();
    const int nl = std::max(1, static_cast<int>(std::lround(coarse_segments * left / (left + right))));
    append_uniform(x, 0.0, fine.front(), nl);
    const double span = fine.back() - fine.front();
    int used = 0;
    for (std::size_t k = 0; k + 1 < fine.size(); ++k) {
      const double len = fine[k + 1] - fine[k];
      int seg = std::max(8, static_cast<int>(std::lround(fine_segments * len / span)));
      if (k + 2 == fine.size()) seg = std::max(8, fine_segments - used);
      used += seg;
      append_uniform(x, fine[k], fine[k + 1], seg);
    }
    append_uniform(x, fine.back(), 1.0, std::max(1, coarse_segments - nl));
    for (double v : x)
      if (std::abs(v - xs) < i) ++d.valley_vertices;
  }
  const int n = static_cast<int>(x.size());
  d.w.assign(n, 0.0);
  d.conductance.resize(n - 1);
  for (int k = 0; k + 1 < n; ++k) {
    const double h = x[k + 1] - x[k];
    if (!(h > 0.0)) throw StructuralError("mesh is not increasing");
    d.w[k] += 0.5 * h;
    d.w[k + 1] += 0.5 * h;
    d.conductance[k] = conductance(profile, x[k], x[k + 1]);
    if (!(d.conductance[k] > 0.0) || !std::isfinite(d.conductance[k]))
      throw StructuralError("non-positive face conductance");
  }
  return d;
}

Spectrum eigensolve(const DiffusionProfile& profile, int n_modes, const EigenOptions& opts) {
  if (n_modes < 1) throw InvalidArgument("need at least one mode");
  Spectrum s;
  s.disc = discretize(profile, opts.mesh);
  const Discretization& d = s.disc;
  const int N = d.size();
  if (profile.shape() == ProfileShape::localized && d.valley_vertices < opts.min_valley_vertices)
    throw PreconditionFailure("mesh has fewer than " + std::to_string(opts.min_valley_vertices) +
                              " points inside the valley");
  if (n_modes > N / 4) throw InvalidArgument("too many modes for the mesh");
  double mass = 0.0;
  for (double w : d.w) mass += w;
  if (std::abs(mass - 1.0) > 1e-12) throw StructuralError("control volumes do not sum to 1");

  s.lambdas.push_back(0.0);
  s.phis.push_back(Vec::Ones(N));
  if (n_modes > 1) {
    const int want = n_modes - 1;
    const int p = std::min(2 * want + 2, N - 2);
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat X(N, p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < N; ++i) X(i, j) = g(rng);
    remove_mean(d, X);
    w_orthonormalize(d, X);
    Vec prev = Vec::Constant(want, std::numeric_limits<double>::infinity());
    Vec theta;
    for (int it = 1; it <= opts.max_iterations; ++it) {
      for (int j = 0; j < p; ++j) X.col(j) = green(d, X.col(j));
      w_orthonormalize(d, X);
      // Rayleigh-Ritz with the flux form x^T K y = sum c (dx)(dy).
      Mat D(N - 1, p);
      for (int j = 0; j < p; ++j)
        for (int i = 0; i + 1 < N; ++i) D(i, j) = std::sqrt(d.conductance[i]) * (X(i, j) - X(i + 1, j));
      const Mat H = D.transpose() * D;
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      X = X * es.eigenvectors();
      theta = es.eigenvalues().head(want);
      s.iterations = it;
      const double change = ((theta - prev).array().abs() / theta.array().abs()).maxCoeff();
      prev = theta;
      if (change <= opts.tol) {
        double res = 0.0;
        for (int k = 0; k < want; ++k) res = std::max(res, mode_residual(d, X.col(k), theta(k)));
        if (res <= opts.residual_tol) break;
      }
      if (it == opts.max_iterations) throw ConvergenceFailure("eigensolver did not converge");
    }
    for (int k = 0; k < want; ++k) {
      Vec phi = X.col(k);
      if (phi(N - 1) < 0.0) phi = -phi;
      s.lambdas.push_back(theta(k));
      s.phis.push_back(std::move(phi));
    }
  }
  const Eigen::Map<const Vec> w(d.w.data(), N);
  for (int j = 0; j < n_modes; ++j) {
    for (int k = 0; k < n_modes; ++k) {
      const double ip = (s.phis[j].array() * w.array() * s.phis[k].array()).sum();
      s.orthonormality = std::max(s.orthonormality, std::abs(ip - (j == k ? 1.0 : 0.0)));
    }
    s.residual = std::max(s.residual, mode_residual(d, s.phis[j], s.lambdas[j]));
  }
  return s;
}

}  // namespace invman
