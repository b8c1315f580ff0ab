#include "invman/core/trajectory.hpp"

#include <algorithm>

#include "invman/core/errors.hpp"

namespace invman {

Trajectory::Trajectory(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivatives)
    : times_(std::move(times)), states_(std::move(states)), derivs_(std::move(derivatives)) {
  if (times_.empty() || times_.size() != states_.size())
    throw InvalidArgument("trajectory needs matching non-empty time and state samples");
  if (!derivs_.empty() && derivs_.size() != states_.size())
    throw InvalidArgument("trajectory derivative samples do not match states");
  if (times_.size() > 1) increasing_ = times_[1] > times_[0];
  for (std::size_t i = 1; i < times_.size(); ++i) {
    const bool ok = increasing_ ? times_[i] > times_[i - 1] : times_[i] < times_[i - 1];
    if (!ok) throw InvalidArgument("trajectory times must be strictly monotone");
  }
}

double Trajectory::t_lo() const { return std::min(times_.front(), times_.back()); }
double Trajectory::t_hi() const { return std::max(times_.front(), times_.back()); }

Vec Trajectory::at(double t) const {
  const double slack = 1e-12 * std::max(1.0, t_hi() - t_lo());
  if (t < t_lo() - slack || t > t_hi() + slack) throw OutOfDomain("time outside trajectory samples");
  if (times_.size() == 1) return states_.front();
  std::size_t j;
  if (increasing_) {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - times_.begin()));
  } else {
    auto it = std::upper_bound(times_.begin(), times_.end(), t, [](double a, double b) { return a > b; });
    j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - times_.begin()));
  }
  j = std::min(j, times_.size() - 1);
  const std::size_t i = j - 1;
  if (t == times_[i]) return states_[i];
  if (t == times_[j]) return states_[j];
  const double h = times_[j] - times_[i];
  const double s = (t - times_[i]) / h;
  if (derivs_.empty()) return (1.0 - s) * states_[i] + s * states_[j];
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * states_[i] + h10 * h * derivs_[i] + h01 * states_[j] + h11 * h * derivs_[j];
}

}  // namespace invman
