#pragma once

#include <functional>
#include <optional>

#include "invman/core/linalg.hpp"

namespace invman {

/// f(t, u) with a declared global Lipschitz constant.
struct Nonlinearity {
  std::function<Vec(double, const Vec&)> eval;
  double lipschitz = 0.0;
  bool zero_at_origin = true;

  Vec operator()(double t, const Vec& u) const { return eval(t, u); }
};

/// The zero map on R^dim.
Nonlinearity zero_nonlinearity(int dim);

/// u' = A(t) u + f(t, u).
class Generator {
 public:
  using LinearPart = std::function<Mat(double)>;

  Generator(int dim, LinearPart a, std::optional<Nonlinearity> f = std::nullopt);
  static Generator autonomous(const Mat& a, std::optional<Nonlinearity> f = std::nullopt);

  int dim() const { return dim_; }
  bool is_autonomous() const { return constant_.has_value(); }

  Mat linear(double t) const;
  Vec apply_linear(double t, const Vec& u) const;

  bool has_nonlinearity() const { return f_.has_value(); }
  const Nonlinearity& nonlinearity() const;
  double lipschitz() const { return f_ ? f_->lipschitz : 0.0; }

  Vec field(double t, const Vec& u) const;

  Generator linear_only() const;
  Generator with_nonlinearity(Nonlinearity f) const;
  /// A(t) + shift * I.
  Generator shifted(double shift) const;
  /// A(t) + B(t).
  Generator perturbed(LinearPart b) const;
  Generator perturbed(const Mat& b) const;

 private:
  int dim_;
  LinearPart a_;
  std::optional<Mat> constant_;
  std::optional<Nonlinearity> f_;
};

}  // namespace invman
