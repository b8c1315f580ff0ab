#pragma once

#include <vector>

#include <Eigen/Dense>

namespace invman {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Spectral norm.
double op_norm(const Mat& m);

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

/// Orthonormal basis of the column space of `p` with `rank` columns, picked by
/// pivoted Gram-Schmidt so axis-aligned projections give unit vectors exactly.
Mat image_basis(const Mat& p, int rank);

/// Orthonormal basis (columns) of the orthogonal complement of span(basis).
Mat complement_basis(const Mat& basis);

/// Rotates the columns of `basis` within their span to best match `reference`
/// (orthogonal Procrustes).
Mat align_basis(const Mat& basis, const Mat& reference);

/// Projection with the given image along the given kernel.
Mat oblique_projection(const Mat& image, const Mat& kernel);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace invman
