#pragma once

#include <vector>

#include "invman/core/linalg.hpp"

namespace invman {

/// Sampled solution with strictly monotone times. With derivative samples the
/// interpolant is piecewise cubic Hermite, otherwise piecewise linear.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivatives = {});

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  int dim() const { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }
  double t_front() const { return times_.front(); }
  double t_back() const { return times_.back(); }
  double t_lo() const;
  double t_hi() const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& states() const { return states_; }
  const std::vector<Vec>& derivatives() const { return derivs_; }
  bool has_derivatives() const { return !derivs_.empty(); }

  const Vec& state(std::size_t i) const { return states_[i]; }
  double time(std::size_t i) const { return times_[i]; }

  Vec at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Vec> states_;
  std::vector<Vec> derivs_;
  bool increasing_ = true;
};

}  // namespace invman
