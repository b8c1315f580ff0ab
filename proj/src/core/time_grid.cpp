#include "invman/core/time_grid.hpp"

#include <cmath>

#include "invman/core/errors.hpp"

namespace invman {

TimeGrid::TimeGrid(double t_min, double t_max, int n_steps)
    : t_min_(t_min), t_max_(t_max), n_steps_(n_steps), h_(0.0) {
  if (n_steps < 1) throw InvalidArgument("TimeGrid needs n_steps >= 1");
  if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_max > t_min))
    throw InvalidArgument("TimeGrid needs finite t_min < t_max");
  h_ = (t_max - t_min) / n_steps;
}

double TimeGrid::node(int i) const {
  if (i < 0 || i > n_steps_) throw OutOfDomain("time node index out of range");
  return i == n_steps_ ? t_max_ : t_min_ + i * h_;
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(n_nodes());
  for (int i = 0; i <= n_steps_; ++i) out[i] = node(i);
  return out;
}

bool TimeGrid::contains(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t_max_ - t_min_));
  return t >= t_min_ - slack && t <= t_max_ + slack;
}

std::pair<int, double> TimeGrid::locate(double t) const {
  if (t <= t_min_) return {0, 0.0};
  if (t >= t_max_) return {n_steps_, 0.0};
  const double pos = (t - t_min_) / h_;
  int i = static_cast<int>(std::floor(pos));
  double w = pos - i;
  if (i >= n_steps_) return {n_steps_, 0.0};
  if (t == node(i)) w = 0.0;
  if (w > 1.0 - 1e-13) return {i + 1, 0.0};
  if (w < 1e-13) w = 0.0;
  return {i, w};
}

}  // namespace invman
