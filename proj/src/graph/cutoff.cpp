#include "invman/graph/cutoff.hpp"

#include <cmath>
#include <random>

#include "invman/core/errors.hpp"

namespace invman {

double smooth_ramp(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

CutoffNonlinearity::CutoffNonlinearity(Nonlinearity base, int dim, double radius, double ramp_width,
                                       double effective_ell)
    : base_(std::move(base)), dim_(dim), radius_(radius), ramp_(ramp_width), ell_(effective_ell) {
  if (!(radius > 0.0) || !(ramp_width > 0.0)) throw InvalidArgument("cut-off radius and ramp width must be positive");
  if (!base_.eval) throw InvalidArgument("cut-off needs a base nonlinearity");
}

Vec CutoffNonlinearity::operator()(double t, const Vec& u) const {
  const double r = u.norm();
  if (r <= radius_) return base_.eval(t, u);
  const double psi = smooth_ramp((r - radius_) / ramp_);
  if (psi == 0.0) return Vec::Zero(u.size());
  return psi * base_.eval(t, (radius_ / r) * u);
}

Nonlinearity CutoffNonlinearity::as_nonlinearity() const {
  CutoffNonlinearity self = *this;
  return Nonlinearity{[self](double t, const Vec& u) { return self(t, u); }, ell_, base_.zero_at_origin};
}

Mat fd_jacobian(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& u) {
  const int d = static_cast<int>(u.size());
  const double h = 1e-5 * (1.0 + u.norm());
  Mat j(d, d);
  Vec up = u, dn = u;
  for (int k = 0; k < d; ++k) {
    up(k) = u(k) + h;
    dn(k) = u(k) - h;
    j.col(k) = (f(t, up) - f(t, dn)) / (2.0 * h);
    up(k) = dn(k) = u(k);
  }
  return j;
}

namespace {

std::vector<Vec> sample_directions(int dim, unsigned seed) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec::Ones(1));
    dirs.push_back(-Vec::Ones(1));
    return dirs;
  }
  if (dim == 2) {
    for (int k = 0; k < 48; ++k) {
      Vec v(2);
      v << std::cos(2 * M_PI * k / 48), std::sin(2 * M_PI * k / 48);
      dirs.push_back(v);
    }
    return dirs;
  }
  if (dim == 3) {
    const int n = 96;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / n;
      const double rr = std::sqrt(1.0 - z * z);
      Vec v(3);
      v << rr * std::cos(golden * k), rr * std::sin(golden * k), z;
      dirs.push_back(v);
    }
    return dirs;
  }
  for (int k = 0; k < dim; ++k) {
    Vec e = Vec::Zero(dim);
    e(k) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 64; ++k) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = n(rng);
    dirs.push_back(v / v.norm());
  }
  return dirs;
}

}  // namespace

double sampled_lipschitz(const std::function<Vec(double, const Vec&)>& f, int dim, const std::vector<double>& radii,
                         const std::vector<double>& times, unsigned seed) {
  const std::vector<Vec> dirs = sample_directions(dim, seed);
  double best = 0.0;
  for (double t : times) {
    for (double r : radii) {
      if (r == 0.0) {
        best = std::max(best, op_norm(fd_jacobian(f, t, Vec::Zero(dim))));
        continue;
      }
      for (const Vec& d : dirs) best = std::max(best, op_norm(fd_jacobian(f, t, r * d)));
    }
  }
  return best;
}

CutoffNonlinearity cutoff(const Nonlinearity& f, int dim, double radius, double ramp_width,
                          const CutoffOptions& opts) {
  if (!(radius > 0.0) || !(ramp_width > 0.0)) throw InvalidArgument("cut-off radius and ramp width must be positive");
  if (!(opts.inflation >= 0.0)) throw InvalidArgument("Lipschitz inflation must be >= 0");
  CutoffNonlinearity probe(f, dim, radius, ramp_width, 0.0);
  std::vector<double> radii;
  for (double s : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999}) radii.push_back(s * radius);
  for (double s : {0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99})
    radii.push_back(radius + s * ramp_width);
  auto eval = [&probe](double t, const Vec& u) { return probe(t, u); };
  const double ell = sampled_lipschitz(eval, dim, radii, opts.sample_times, opts.seed) * (1.0 + opts.inflation);
  return CutoffNonlinearity(f, dim, radius, ramp_width, ell);
}

}  // namespace invman
