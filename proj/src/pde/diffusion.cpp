#include "invman/pde/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "invman/core/errors.hpp"
#include "invman/graph/cutoff.hpp"

namespace invman {

ProfileShape profile_shape_from_string(const std::string& s) {
  if (s == "localized") return ProfileShape::localized;
  if (s == "constant") return ProfileShape::constant;
  throw InvalidArgument("unknown profile shape '" + s + "'");
}

std::string to_string(ProfileShape s) { return s == ProfileShape::localized ? "localized" : "constant"; }

DiffusionProfile::DiffusionProfile(const DiffusionParams& p) : p_(p) {
  if (p.shape == ProfileShape::constant) {
    if (!(p.constant_value > 0.0) || !std::isfinite(p.constant_value))
      throw InvalidArgument("constant diffusivity must be positive");
    return;
  }
  if (!(p.nu > 0.0) || !(p.alpha0 > 0.0) || !(p.beta0 > 0.0)) throw InvalidArgument("nu, alpha0, beta0 must be positive");
  if (!(p.x_star > 0.0 && p.x_star < 1.0)) throw InvalidArgument("x_star must lie in (0,1)");
  alpha_nu_ = p.alpha0;
  beta_nu_ = p.beta0 * (1.0 + std::sqrt(p.nu));
  if (p.nu * beta_nu_ >= std::min(p.x_star, 1.0 - p.x_star))
    throw PreconditionFailure("nu beta_nu must be below min(x*, 1-x*)");
}

double DiffusionProfile::operator()(double x) const {
  if (p_.shape == ProfileShape::constant) return p_.constant_value;
  const double r = std::abs(x - p_.x_star);
  const double inner = p_.nu * p_.beta0, outer = p_.nu * beta_nu_;
  const double lo = p_.nu * p_.alpha0, hi = 1.0 / p_.nu;
  if (r <= inner) return lo;
  if (r >= outer) return hi;
  const double s = smooth_ramp((outer - r) / (outer - inner));  // 1 at the inner edge
  return std::max(lo, lo * s + hi * (1.0 - s));
}

std::vector<double> DiffusionProfile::breakpoints() const {
  if (p_.shape == ProfileShape::constant) return {};
  const double x = p_.x_star, i = p_.nu * p_.beta0, o = p_.nu * beta_nu_;
  return {x - o, x - i, x + i, x + o};
}

BandReport DiffusionProfile::check_bands(const std::vector<double>& mesh) const {
  BandReport rep;
  if (p_.shape == ProfileShape::constant) {
    rep.pass = true;
    return rep;
  }
  std::vector<double> pts = mesh;
  const int dense = 20001;
  const double x = p_.x_star, o = p_.nu * beta_nu_;
  for (int k = 0; k < dense; ++k) pts.push_back(static_cast<double>(k) / (dense - 1));
  for (int k = 0; k < dense; ++k) pts.push_back(x - o + 2.0 * o * k / (dense - 1));
  rep.outside_min = rep.inside_min = std::numeric_limits<double>::infinity();
  rep.valley_max = 0.0;
  for (double p : pts) {
    if (p < 0.0 || p > 1.0) continue;
    const double r = std::abs(p - x);
    const double a = (*this)(p);
    if (r > o) rep.outside_min = std::min(rep.outside_min, a);
    if (r < o) rep.inside_min = std::min(rep.inside_min, a);
    if (r < p_.nu * p_.beta0) rep.valley_max = std::max(rep.valley_max, a);
    ++rep.samples;
  }
  rep.pass = rep.outside_min >= 1.0 / p_.nu && rep.inside_min >= p_.nu * p_.alpha0 &&
             rep.valley_max <= p_.nu * alpha_nu_ * (1.0 + 1e-14);
  return rep;
}

DiffusionProfile build_diffusion(const DiffusionParams& p) {
  DiffusionProfile prof(p);
  const BandReport rep = prof.check_bands({});
  if (!rep.pass) throw StructuralError("diffusion profile violates its bands");
  return prof;
}

}  // namespace invman
