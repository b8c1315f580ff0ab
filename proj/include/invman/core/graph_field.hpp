#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "invman/core/linalg.hpp"
#include "invman/core/time_grid.hpp"

namespace invman {

/// Which projection family a graph is a graph over.
enum class GraphOrientation {
  over_image,   ///< Sigma: base Im Q(t), values in Ker Q(t)
  over_kernel,  ///< Theta: base Ker Q(t), values in Im Q(t)
};

std::string to_string(GraphOrientation o);
GraphOrientation orientation_from_string(const std::string& s);

/// How queries outside the stored extents are treated.
enum class Extent { strict, clamp_time, clamp };

struct AxisSpec {
  double lo = -1.0;
  double hi = 1.0;
  int count = 21;
  double spacing() const { return (hi - lo) / (count - 1); }
  double node(int i) const {
    if (i == count - 1) return hi;
    const double x = lo + i * spacing();
    return std::abs(x) < 1e-14 * (hi - lo) ? 0.0 : x;
  }
};

/// Tensor grid over base coordinates.
class QGrid {
 public:
  QGrid() = default;
  explicit QGrid(std::vector<AxisSpec> axes);
  static QGrid uniform(int dim, double extent, int count);

  int dim() const { return static_cast<int>(axes_.size()); }
  int size() const { return size_; }
  const std::vector<AxisSpec>& axes() const { return axes_; }
  const AxisSpec& axis(int k) const { return axes_[k]; }
  int stride(int k) const { return strides_[k]; }

  Vec node(int flat) const;
  std::vector<int> multi_index(int flat) const;
  bool contains(const Vec& q, double slack = 1e-12) const;

 private:
  std::vector<AxisSpec> axes_;
  std::vector<int> strides_;
  int size_ = 0;
};

/// Coordinates adapted to a splitting at one time: u = base * a + value * v.
struct SplitFrame {
  Mat base;
  Mat value;
  Mat extract;  ///< [base value]^{-1}

  int base_dim() const { return static_cast<int>(base.cols()); }
  int value_dim() const { return static_cast<int>(value.cols()); }
  Vec base_coords(const Vec& u) const { return extract.topRows(base_dim()) * u; }
  Vec value_coords(const Vec& u) const { return extract.bottomRows(value_dim()) * u; }
  /// Projection onto span(base) along span(value).
  Mat base_projection() const { return base * extract.topRows(base_dim()); }
  Mat value_projection() const { return value * extract.bottomRows(value_dim()); }
};

/// Split frames at the nodes of a time grid, built from projections Q(t).
class SplitFrames {
 public:
  SplitFrames() = default;
  SplitFrames(const TimeGrid& grid, const std::vector<Mat>& projections, GraphOrientation orientation);
  /// Frames given directly (bases need not be orthonormal).
  SplitFrames(const TimeGrid& grid, std::vector<SplitFrame> frames, GraphOrientation orientation);

  const TimeGrid& grid() const { return grid_; }
  GraphOrientation orientation() const { return orientation_; }
  bool constant() const { return constant_; }
  int state_dim() const { return static_cast<int>(nodes_.front().base.rows()); }
  int base_dim() const { return nodes_.front().base_dim(); }
  int value_dim() const { return nodes_.front().value_dim(); }

  const SplitFrame& node(int i) const { return nodes_[i]; }
  /// Frame at time t (clamped to the grid); may fill and return `scratch`.
  const SplitFrame& at(double t, SplitFrame& scratch) const;
  SplitFrame at(double t) const;
  /// The underlying Q(t).
  Mat projection(double t) const;

 private:
  void finish();

  TimeGrid grid_{0.0, 1.0, 1};
  GraphOrientation orientation_ = GraphOrientation::over_image;
  std::vector<SplitFrame> nodes_;
  bool constant_ = false;
};

/// Graph (t, a) -> v over base coordinates a, values v in value coordinates,
/// with multilinear interpolation in a and linear interpolation in t.
class GraphField {
 public:
  GraphField(SplitFrames frames, QGrid grid, double kappa, double grid_slack);
  GraphField(SplitFrames frames, QGrid grid, double kappa, double grid_slack, std::vector<double> values);

  const TimeGrid& time_grid() const { return frames_.grid(); }
  const QGrid& q_grid() const { return grid_; }
  const SplitFrames& frames() const { return frames_; }
  GraphOrientation orientation() const { return frames_.orientation(); }
  int base_dim() const { return grid_.dim(); }
  int value_dim() const { return frames_.value_dim(); }
  int state_dim() const { return frames_.state_dim(); }
  double kappa() const { return kappa_; }
  double grid_slack() const { return grid_slack_; }
  const std::vector<double>& values() const { return values_; }

  Vec node_value(int time_index, int q_index) const;
  void set_node_value(int time_index, int q_index, const Vec& v);

  Vec eval(double t, const Vec& a, Extent ext = Extent::strict) const;
  /// Allocation-free variant; `out` must have value_dim entries.
  void eval_into(double t, const Vec& a, Extent ext, Vec& out) const;

  /// Point of the graph over base coordinates a, in state space.
  Vec lift(double t, const Vec& a, Extent ext = Extent::strict) const;
  /// Nonlinear projection u -> base(u) + graph(base(u)).
  Vec project(double t, const Vec& u, Extent ext = Extent::strict) const;

  /// Largest operator norm of forward-difference Jacobians over all cells.
  double lipschitz_estimate() const;
  /// Largest |value| over q = 0 nodes (0 when the grid has no such node).
  double zero_section_residual() const;

  /// Free-form provenance recorded with the field (ledger constants etc).
  std::vector<std::pair<std::string, double>> provenance;

 private:
  int flat(int time_index, int q_index) const { return (time_index * grid_.size() + q_index) * value_dim(); }

  SplitFrames frames_;
  QGrid grid_;
  double kappa_;
  double grid_slack_;
  std::vector<double> values_;
};

}  // namespace invman
