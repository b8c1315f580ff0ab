#pragma once

#include <string>
#include <vector>

namespace invman {

enum class ProfileShape { localized, constant };

ProfileShape profile_shape_from_string(const std::string& s);
std::string to_string(ProfileShape s);

struct DiffusionParams {
  ProfileShape shape = ProfileShape::localized;
  double nu = 1e-3;
  double x_star = 0.5;
  double alpha0 = 1.0;
  double beta0 = 2.4;
  double constant_value = 1.0;  ///< diffusivity of the constant shape
};

struct BandReport {
  double outside_min = 0.0;  ///< min a on (0, x*-nu beta_nu) u (x*+nu beta_nu, 1); must be >= 1/nu
  double inside_min = 0.0;   ///< min a on the beta_nu band; must be >= nu alpha0
  double valley_max = 0.0;   ///< max a on the beta0 band; must be <= nu alpha_nu
  int samples = 0;
  bool pass = false;
};

/// Diffusivity a_nu on [0,1]. The localized shape is 1/nu outside
/// x* +- nu beta_nu, nu alpha0 on x* +- nu beta0, joined by smootherstep ramps,
/// with beta_nu = beta0 (1 + sqrt(nu)) and alpha_nu = alpha0.
class DiffusionProfile {
 public:
  explicit DiffusionProfile(const DiffusionParams& p);

  double operator()(double x) const;

  const DiffusionParams& params() const { return p_; }
  ProfileShape shape() const { return p_.shape; }
  double nu() const { return p_.nu; }
  double x_star() const { return p_.x_star; }
  double alpha_nu() const { return alpha_nu_; }
  double beta_nu() const { return beta_nu_; }

  /// Points where the profile is not smooth (interior band edges), ascending.
  std::vector<double> breakpoints() const;

  /// Pointwise check of the three bands on the given points plus a dense sample.
  BandReport check_bands(const std::vector<double>& mesh) const;

 private:
  DiffusionParams p_;
  double alpha_nu_ = 0.0;
  double beta_nu_ = 0.0;
};

/// Validates the parameters and the bands; throws on impossible parameters.
DiffusionProfile build_diffusion(const DiffusionParams& p);

}  // namespace invman
