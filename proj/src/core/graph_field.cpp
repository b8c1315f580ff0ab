#include "invman/core/graph_field.hpp"

#include <cmath>

#include "invman/core/errors.hpp"

namespace invman {

std::string to_string(GraphOrientation o) { return o == GraphOrientation::over_image ? "over_image" : "over_kernel"; }

GraphOrientation orientation_from_string(const std::string& s) {
  if (s == "over_image") return GraphOrientation::over_image;
  if (s == "over_kernel") return GraphOrientation::over_kernel;
  throw InvalidArgument("unknown graph orientation '" + s + "'");
}

QGrid::QGrid(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InvalidArgument("q-grid needs at least one axis");
  strides_.resize(axes_.size());
  size_ = 1;
  for (int k = dim() - 1; k >= 0; --k) {
    const AxisSpec& a = axes_[k];
    if (a.count < 2) throw InvalidArgument("q-grid axis needs at least 2 nodes");
    if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
      throw InvalidArgument("q-grid axis needs finite lo < hi");
    strides_[k] = size_;
    size_ *= a.count;
  }
}

QGrid QGrid::uniform(int dim, double extent, int count) {
  return QGrid(std::vector<AxisSpec>(dim, AxisSpec{-extent, extent, count}));
}

std::vector<int> QGrid::multi_index(int flat) const {
  std::vector<int> idx(axes_.size());
  for (int k = 0; k < dim(); ++k) {
    idx[k] = flat / strides_[k];
    flat %= strides_[k];
  }
  return idx;
}

Vec QGrid::node(int flat) const {
  Vec q(dim());
  for (int k = 0; k < dim(); ++k) {
    q(k) = axes_[k].node(flat / strides_[k]);
    flat %= strides_[k];
  }
  return q;
}

bool QGrid::contains(const Vec& q, double slack) const {
  for (int k = 0; k < dim(); ++k) {
    const double s = slack * (axes_[k].hi - axes_[k].lo);
    if (q(k) < axes_[k].lo - s || q(k) > axes_[k].hi + s) return false;
  }
  return true;
}

namespace {

SplitFrame make_frame(Mat base, Mat value) {
  const int d = static_cast<int>(base.rows());
  Mat full(d, d);
  full << base, value;
  Eigen::FullPivLU<Mat> lu(full);
  if (!lu.isInvertible()) throw DegenerateGap("split frame is singular");
  return SplitFrame{std::move(base), std::move(value), lu.inverse()};
}

}  // namespace

SplitFrames::SplitFrames(const TimeGrid& grid, const std::vector<Mat>& projections, GraphOrientation orientation)
    : grid_(grid), orientation_(orientation) {
  if (static_cast<int>(projections.size()) != grid.n_nodes())
    throw InvalidArgument("one projection per time node required");
  const int d = static_cast<int>(projections.front().rows());
  const Mat id = Mat::Identity(d, d);
  Mat prev_image, prev_kernel;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const Mat& q = projections[i];
    if (q.rows() != d || q.cols() != d) throw InvalidArgument("projection shape mismatch");
    const int r = static_cast<int>(std::lround(q.trace()));
    if (r < 0 || r > d) throw InvalidArgument("projection trace out of range");
    Mat image = r > 0 ? image_basis(q, r) : Mat(d, 0);
    Mat kernel = r < d ? image_basis(id - q, d - r) : Mat(d, 0);
    if (i > 0 && !(q - projections[i - 1]).isZero(0.0)) {
      image = align_basis(image, prev_image);
      kernel = align_basis(kernel, prev_kernel);
    } else if (i > 0) {
      image = prev_image;
      kernel = prev_kernel;
    }
    prev_image = image;
    prev_kernel = kernel;
    if (orientation == GraphOrientation::over_image)
      nodes_.push_back(make_frame(image, kernel));
    else
      nodes_.push_back(make_frame(kernel, image));
  }
  finish();
}

SplitFrames::SplitFrames(const TimeGrid& grid, std::vector<SplitFrame> frames, GraphOrientation orientation)
    : grid_(grid), orientation_(orientation), nodes_(std::move(frames)) {
  if (static_cast<int>(nodes_.size()) != grid.n_nodes()) throw InvalidArgument("one frame per time node required");
  for (auto& f : nodes_) f = make_frame(f.base, f.value);
  finish();
}

void SplitFrames::finish() {
  constant_ = true;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i].base - nodes_[0].base).isZero(0.0) || !(nodes_[i].value - nodes_[0].value).isZero(0.0))
      constant_ = false;
  }
}

const SplitFrame& SplitFrames::at(double t, SplitFrame& scratch) const {
  if (constant_) return nodes_.front();
  auto [i, w] = grid_.locate(t);
  if (w == 0.0) return nodes_[i];
  const SplitFrame& a = nodes_[i];
  const SplitFrame& b = nodes_[i + 1];
  scratch = make_frame((1.0 - w) * a.base + w * b.base, (1.0 - w) * a.value + w * b.value);
  return scratch;
}

SplitFrame SplitFrames::at(double t) const {
  SplitFrame scratch;
  return at(t, scratch);
}

Mat SplitFrames::projection(double t) const {
  SplitFrame scratch;
  const SplitFrame& f = at(t, scratch);
  return orientation_ == GraphOrientation::over_image ? f.base_projection() : f.value_projection();
}

GraphField::GraphField(SplitFrames frames, QGrid grid, double kappa, double grid_slack)
    : GraphField(frames, grid, kappa, grid_slack,
                 std::vector<double>(static_cast<std::size_t>(frames.grid().n_nodes()) * grid.size() *
                                         frames.value_dim(),
                                     0.0)) {}

GraphField::GraphField(SplitFrames frames, QGrid grid, double kappa, double grid_slack, std::vector<double> values)
    : frames_(std::move(frames)), grid_(std::move(grid)), kappa_(kappa), grid_slack_(grid_slack),
      values_(std::move(values)) {
  if (frames_.base_dim() < 1 || frames_.value_dim() < 1)
    throw InvalidArgument("graph needs nonzero base and value dimensions");
  if (grid_.dim() != frames_.base_dim()) throw InvalidArgument("q-grid dimension differs from base dimension");
  if (!(kappa_ >= 0.0) || !(grid_slack_ >= 0.0)) throw InvalidArgument("kappa and grid slack must be >= 0");
  const std::size_t expected =
      static_cast<std::size_t>(frames_.grid().n_nodes()) * grid_.size() * static_cast<std::size_t>(value_dim());
  if (values_.size() != expected) throw InvalidArgument("graph value array has wrong size");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("graph values must be finite");
}

Vec GraphField::node_value(int time_index, int q_index) const {
  Vec v(value_dim());
  const int base = flat(time_index, q_index);
  for (int j = 0; j < value_dim(); ++j) v(j) = values_[base + j];
  return v;
}

void GraphField::set_node_value(int time_index, int q_index, const Vec& v) {
  if (!v.allFinite()) throw InvalidArgument("graph values must be finite");
  const int base = flat(time_index, q_index);
  for (int j = 0; j < value_dim(); ++j) values_[base + j] = v(j);
}

Vec GraphField::eval(double t, const Vec& a, Extent ext) const {
  Vec out(value_dim());
  eval_into(t, a, ext, out);
  return out;
}

void GraphField::eval_into(double t, const Vec& a, Extent ext, Vec& out) const {
  const int r = base_dim();
  const int m = value_dim();
  if (a.size() != r) throw InvalidArgument("graph query has wrong dimension");
  out.setZero(m);
  if (a.isZero(0.0)) return;
  const TimeGrid& tg = time_grid();
  if (ext == Extent::strict && !tg.contains(t)) throw OutOfDomain("graph query time outside the window");
  const auto [ti, tw] = tg.locate(t);

  constexpr int kMaxAxes = 8;
  if (r > kMaxAxes) throw InvalidArgument("graph base dimension too large");
  int idx[kMaxAxes];
  double frac[kMaxAxes];
  for (int k = 0; k < r; ++k) {
    const AxisSpec& ax = grid_.axis(k);
    const double h = ax.spacing();
    double pos = (a(k) - ax.lo) / h;
    const double last = ax.count - 1;
    if (pos < -1e-9 || pos > last + 1e-9) {
      if (ext != Extent::clamp) throw OutOfDomain("graph query outside the stored extents");
    }
    pos = std::clamp(pos, 0.0, last);
    int i = static_cast<int>(std::floor(pos));
    double f = pos - i;
    if (f > 1.0 - 1e-12) {
      ++i;
      f = 0.0;
    } else if (f < 1e-12) {
      f = 0.0;
    }
    if (i >= ax.count - 1) {
      i = ax.count - 2;
      f = 1.0;
    }
    idx[k] = i;
    frac[k] = f;
  }
  const int corners = 1 << r;
  for (int slice = 0; slice < 2; ++slice) {
    const double sw = slice == 0 ? 1.0 - tw : tw;
    if (sw == 0.0) continue;
    const int it = ti + slice;
    for (int c = 0; c < corners; ++c) {
      double w = sw;
      int q = 0;
      for (int k = 0; k < r; ++k) {
        const bool up = (c >> k) & 1;
        w *= up ? frac[k] : 1.0 - frac[k];
        q += (idx[k] + (up ? 1 : 0)) * grid_.stride(k);
      }
      if (w == 0.0) continue;
      const int base = flat(it, q);
      for (int j = 0; j < m; ++j) out(j) += w * values_[base + j];
    }
  }
}

Vec GraphField::lift(double t, const Vec& a, Extent ext) const {
  SplitFrame scratch;
  const SplitFrame& f = frames_.at(t, scratch);
  return f.base * a + f.value * eval(t, a, ext);
}

Vec GraphField::project(double t, const Vec& u, Extent ext) const {
  if (u.size() != state_dim()) throw InvalidArgument("state dimension does not match graph");
  SplitFrame scratch;
  const SplitFrame& f = frames_.at(t, scratch);
  const Vec a = f.base_coords(u);
  return f.base * a + f.value * eval(t, a, ext);
}

double GraphField::lipschitz_estimate() const {
  const int r = base_dim();
  const int m = value_dim();
  double best = 0.0;
  Mat jac(m, r);
  for (int it = 0; it < time_grid().n_nodes(); ++it) {
    for (int q = 0; q < grid_.size(); ++q) {
      const std::vector<int> idx = grid_.multi_index(q);
      bool interior = true;
      for (int k = 0; k < r; ++k)
        if (idx[k] >= grid_.axis(k).count - 1) interior = false;
      if (!interior) continue;
      const int b0 = flat(it, q);
      for (int k = 0; k < r; ++k) {
        const int b1 = flat(it, q + grid_.stride(k));
        const double h = grid_.axis(k).spacing();
        for (int j = 0; j < m; ++j) jac(j, k) = (values_[b1 + j] - values_[b0 + j]) / h;
      }
      best = std::max(best, op_norm(jac));
    }
  }
  return best;
}

double GraphField::zero_section_residual() const {
  double worst = 0.0;
  const Vec zero = Vec::Zero(base_dim());
  for (int q = 0; q < grid_.size(); ++q) {
    if (!grid_.node(q).isZero(0.0)) continue;
    for (int it = 0; it < time_grid().n_nodes(); ++it) worst = std::max(worst, node_value(it, q).cwiseAbs().maxCoeff());
  }
  for (int it = 0; it < time_grid().n_nodes(); ++it)
    worst = std::max(worst, eval(time_grid().node(it), zero).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace invman
