#pragma once

#include <utility>
#include <vector>

namespace invman {

/// Uniform grid t_min = t_0 < ... < t_n = t_max.
class TimeGrid {
 public:
  TimeGrid(double t_min, double t_max, int n_steps);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int n_steps() const { return n_steps_; }
  int n_nodes() const { return n_steps_ + 1; }
  double step() const { return h_; }

  double node(int i) const;
  std::vector<double> nodes() const;
  bool contains(double t) const;

  /// Cell index i and weight w with t = (1-w) t_i + w t_{i+1}; t is clamped
  /// into the grid. Node times give w = 0 exactly.
  std::pair<int, double> locate(double t) const;

 private:
  double t_min_;
  double t_max_;
  int n_steps_;
  double h_;
};

}  // namespace invman
