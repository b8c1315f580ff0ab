#include "invman/core/linalg.hpp"

#include <cmath>
#include <vector>

#include "invman/core/errors.hpp"

namespace invman {

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

Mat image_basis(const Mat& p, int rank) {
  const int d = static_cast<int>(p.rows());
  Mat basis(d, rank);
  Mat work = p;
  std::vector<bool> used(p.cols(), false);
  for (int k = 0; k < rank; ++k) {
    int best = -1;
    double best_norm = 0.0;
    for (int j = 0; j < work.cols(); ++j) {
      if (used[j]) continue;
      const double n = work.col(j).norm();
      if (n > best_norm) {
        best_norm = n;
        best = j;
      }
    }
    if (best < 0 || best_norm <= 1e-12 * std::max(1.0, p.norm()))
      throw DegenerateGap("projection has rank below " + std::to_string(rank));
    used[best] = true;
    Vec b = work.col(best);
    for (int i = 0; i < k; ++i) b -= basis.col(i).dot(b) * basis.col(i);
    b /= b.norm();
    basis.col(k) = b;
    for (int j = 0; j < work.cols(); ++j) {
      if (!used[j]) work.col(j) -= b.dot(work.col(j)) * b;
    }
  }
  return basis;
}

Mat complement_basis(const Mat& basis) {
  const int d = static_cast<int>(basis.rows());
  const int r = static_cast<int>(basis.cols());
  Mat p = Mat::Identity(d, d) - basis * basis.transpose();
  return image_basis(p, d - r);
}

Mat align_basis(const Mat& basis, const Mat& reference) {
  if (basis.cols() == 0) return basis;
  Mat m = basis.transpose() * reference;
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return basis * (svd.matrixU() * svd.matrixV().transpose());
}

Mat oblique_projection(const Mat& image, const Mat& kernel) {
  const int d = static_cast<int>(image.rows());
  const int r = static_cast<int>(image.cols());
  if (r == 0) return Mat::Zero(d, d);
  if (r == d) return Mat::Identity(d, d);
  Mat frame(d, d);
  frame << image, kernel;
  Eigen::FullPivLU<Mat> lu(frame);
  if (!lu.isInvertible()) throw DegenerateGap("image and kernel are not complementary");
  Mat inv = lu.inverse();
  return image * inv.topRows(r);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidArgument("fit_slope needs at least two samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx <= 0.0) throw InvalidArgument("fit_slope needs distinct abscissae");
  return sxy / sxx;
}

}  // namespace invman
