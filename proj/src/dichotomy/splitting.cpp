#include "invman/dichotomy/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "invman/core/errors.hpp"
#include "invman/core/propagate.hpp"

namespace invman {

void SplittingCertificate::validate(double tol_proj) const {
  if (static_cast<int>(projections.size()) != grid.n_nodes())
    throw ContractViolation("certificate needs one projection per node");
  if (!(gamma > rho)) throw ContractViolation("certificate needs gamma > rho");
  if (!(M >= 1.0)) throw ContractViolation("certificate needs M >= 1");
  for (const Mat& q : projections) {
    if (q.rows() != dim || q.cols() != dim) throw ContractViolation("projection shape mismatch");
    if ((q * q - q).norm() > tol_proj * std::max(1.0, q.norm())) throw ContractViolation("projection is not idempotent");
    if (std::lround(q.trace()) != rank) throw ContractViolation("projection rank varies across nodes");
  }
}

namespace {

/// L(t_j, t_i) for all i <= j from consecutive node propagators.
class NodePropagators {
 public:
  NodePropagators(const Generator& proc, const TimeGrid& grid, double step) : n_(grid.n_nodes()) {
    steps_.reserve(n_ - 1);
    for (int k = 0; k + 1 < n_; ++k) steps_.push_back(propagator(proc, grid.node(k), grid.node(k + 1), step));
    const int d = proc.dim();
    table_.assign(static_cast<std::size_t>(n_) * n_, Mat());
    for (int i = 0; i < n_; ++i) {
      Mat acc = Mat::Identity(d, d);
      at(i, i) = acc;
      for (int j = i + 1; j < n_; ++j) {
        acc = steps_[j - 1] * acc;
        at(j, i) = acc;
      }
    }
  }
  const Mat& get(int j, int i) const { return table_[static_cast<std::size_t>(j) * n_ + i]; }

 private:
  Mat& at(int j, int i) { return table_[static_cast<std::size_t>(j) * n_ + i]; }
  int n_;
  std::vector<Mat> steps_;
  std::vector<Mat> table_;
};

/// L(t_i, t_j) Q(t_j) for t_i < t_j, using that L(t_j, t_i) maps Im Q(t_i)
/// onto Im Q(t_j) invertibly.
Mat backward_on_image(const Mat& forward, const Mat& q_early, const Mat& q_late, int rank) {
  const int d = static_cast<int>(forward.rows());
  if (rank == 0) return Mat::Zero(d, d);
  const Mat b = image_basis(q_early, rank);
  const Mat fb = forward * b;
  Eigen::JacobiSVD<Mat> svd(fb, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return b * svd.solve(q_late);
}

struct PairRatios {
  double forward = 0.0;
  double backward = 0.0;
  double commutation = 0.0;
};

PairRatios pair_ratios(const Mat& phi, const Mat& q_i, const Mat& q_j, double dt, double M, double gamma, double rho,
                       int rank) {
  const int d = static_cast<int>(phi.rows());
  const Mat id = Mat::Identity(d, d);
  PairRatios r;
  if (rank < d) r.forward = op_norm(phi * (id - q_i)) * std::exp(gamma * dt) / M;
  if (rank > 0) r.backward = op_norm(backward_on_image(phi, q_i, q_j, rank)) * std::exp(-rho * dt) / M;
  const double scale = std::max(op_norm(phi), 1e-300);
  r.commutation = op_norm(q_j * phi - phi * q_i) / scale;
  return r;
}

}  // namespace

SplittingCertificate estimate_splitting(const Generator& proc, int rank, const TimeGrid& grid,
                                        const SplittingOptions& opts) {
  const int d = proc.dim();
  if (rank < 0 || rank > d) throw InvalidArgument("rank must lie in [0, dim]");
  if (!(opts.window > 0.0) || !(opts.step > 0.0)) throw InvalidArgument("window and step must be positive");
  if (!(opts.degenerate_ratio > 1.0)) throw InvalidArgument("degenerate-gap ratio must exceed 1");
  const double W = opts.window;
  const Mat id = Mat::Identity(d, d);

  SplittingCertificate cert;
  cert.grid = grid;
  cert.rank = rank;
  cert.dim = d;
  cert.exponents.assign(d, 0.0);
  double gamma = std::numeric_limits<double>::infinity();
  double rho = -std::numeric_limits<double>::infinity();
  std::vector<Mat> windows_f, windows_b;

  for (int k = 0; k < grid.n_nodes(); ++k) {
    const double t = grid.node(k);
    const Mat phi_b = propagator(proc, t - W, t, opts.step);
    const Mat phi_f = propagator(proc, t, t + W, opts.step);
    if (!phi_b.allFinite() || !phi_f.allFinite()) throw BlowUp("window propagator overflowed");
    Eigen::JacobiSVD<Mat> whole(phi_f * phi_b);
    for (int i = 0; i < d; ++i)
      cert.exponents[i] += std::log(std::max(whole.singularValues()(i), 1e-300)) / (2 * W) / grid.n_nodes();

    Mat q;
    Eigen::JacobiSVD<Mat> svd_b(phi_b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (rank == 0) {
      q = Mat::Zero(d, d);
    } else if (rank == d) {
      q = id;
    } else {
      Eigen::JacobiSVD<Mat> svd_f(phi_f, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sb = svd_b.singularValues();
      const auto& sf = svd_f.singularValues();
      const double ratio = std::min(sb(rank - 1) / sb(rank), sf(rank - 1) / sf(rank));
      if (!(ratio >= opts.degenerate_ratio))
        throw DegenerateGap("singular-value ratio " + std::to_string(ratio) + " at the cut is below " +
                            std::to_string(opts.degenerate_ratio) + " (t=" + std::to_string(t) + ")");
      const Mat image = svd_b.matrixU().leftCols(rank);
      const Mat kernel = svd_f.matrixV().rightCols(d - rank);
      q = oblique_projection(image, kernel);
    }
    if (rank < d) gamma = std::min(gamma, -std::log(op_norm(phi_f * (id - q))) / W);
    if (rank > 0) {
      const auto& s = svd_b.singularValues();
      const Mat u = svd_b.matrixU().leftCols(rank);
      const Mat v = svd_b.matrixV().leftCols(rank);
      const Vec inv = s.head(rank).cwiseInverse();
      // Exact preimage under the window propagator of vectors in Im Q(t).
      const Mat pre = v * inv.asDiagonal() * u.transpose() * q;
      rho = std::max(rho, std::log(op_norm(pre)) / W);
    }
    cert.projections.push_back(q);
    windows_f.push_back(phi_f);
    windows_b.push_back(phi_b);
  }

  if (rank == 0) rho = gamma > 0.0 ? -gamma : gamma - 1.0;
  if (rank == d) gamma = rho < 0.0 ? -rho : rho + 1.0;
  if (!(gamma > rho)) throw DegenerateGap("fitted rates give gamma <= rho; no splitting");
  cert.gamma = gamma;
  cert.rho = rho;

  // Minimal M on the sample set, then inflated.
  double m_fit = 1.0;
  double idem = 0.0;
  for (int k = 0; k < grid.n_nodes(); ++k) {
    const Mat& q = cert.projections[k];
    idem = std::max(idem, (q * q - q).norm());
    if (rank > 0) m_fit = std::max(m_fit, op_norm(q));
    if (rank < d) {
      m_fit = std::max(m_fit, op_norm(id - q));
      m_fit = std::max(m_fit, op_norm(windows_f[k] * (id - q)) * std::exp(gamma * W));
    }
  }
  const NodePropagators props(proc, grid, opts.step);
  double comm = 0.0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    for (int j = i + 1; j < grid.n_nodes(); ++j) {
      const PairRatios r = pair_ratios(props.get(j, i), cert.projections[i], cert.projections[j],
                                       grid.node(j) - grid.node(i), 1.0, gamma, rho, rank);
      m_fit = std::max({m_fit, r.forward, r.backward});
      comm = std::max(comm, r.commutation);
    }
  }
  cert.M = 1.0 + (1.0 + opts.m_inflation) * (m_fit - 1.0);
  cert.residuals.idempotency = idem;
  cert.residuals.commutation = comm;
  cert.residuals.forward_ratio = rank < d ? m_fit / cert.M : 0.0;
  cert.residuals.backward_ratio = rank > 0 ? m_fit / cert.M : 0.0;
  std::sort(cert.exponents.begin(), cert.exponents.end(), std::greater<>());
  return cert;
}

SplittingReport verify_splitting(const Generator& proc, const SplittingCertificate& cert, int samples,
                                 const VerifyOptions& opts) {
  if (proc.dim() != cert.dim) throw InvalidArgument("certificate and process dimensions differ");
  const int n = cert.grid.n_nodes();
  const int d = cert.dim;
  const Mat id = Mat::Identity(d, d);
  SplittingReport rep;
  rep.tol = opts.tol;

  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
  std::set<std::pair<int, int>> chosen;
  if (static_cast<int>(all.size()) <= samples) {
    chosen.insert(all.begin(), all.end());
  } else {
    for (int i = 0; i + 1 < n; ++i) chosen.emplace(i, i + 1);
    if (n > 1) chosen.emplace(0, n - 1);
    std::mt19937 rng(opts.seed);
    std::shuffle(all.begin(), all.end(), rng);
    for (const auto& p : all) {
      if (static_cast<int>(chosen.size()) >= std::max(samples, n)) break;
      chosen.insert(p);
    }
  }

  for (int k = 0; k < n; ++k) {
    const Mat& q = cert.projections[k];
    rep.idempotency = std::max(rep.idempotency, (q * q - q).norm());
    if (cert.rank > 0) rep.worst_backward = std::max(rep.worst_backward, op_norm(q) / cert.M);
    if (cert.rank < d) rep.worst_forward = std::max(rep.worst_forward, op_norm(id - q) / cert.M);
  }
  const NodePropagators props(proc, cert.grid, opts.step);
  for (const auto& [i, j] : chosen) {
    const PairRatios r = pair_ratios(props.get(j, i), cert.projections[i], cert.projections[j],
                                     cert.grid.node(j) - cert.grid.node(i), cert.M, cert.gamma, cert.rho, cert.rank);
    rep.worst_forward = std::max(rep.worst_forward, r.forward);
    rep.worst_backward = std::max(rep.worst_backward, r.backward);
    rep.commutation = std::max(rep.commutation, r.commutation);
  }
  rep.pairs = static_cast<int>(chosen.size());
  rep.pass = rep.worst_forward <= 1.0 + opts.tol && rep.worst_backward <= 1.0 + opts.tol &&
             rep.commutation <= opts.tol && rep.idempotency <= opts.tol;
  return rep;
}

NestednessReport nestedness_check(const SplittingCertificate& coarse, const SplittingCertificate& fine, double tol) {
  if (fine.rank > coarse.rank) throw StructuralError("fine splitting has larger rank than the coarse one");
  if (coarse.dim != fine.dim) throw StructuralError("splittings live on different state spaces");
  if (coarse.grid.n_nodes() != fine.grid.n_nodes()) throw StructuralError("splittings use different time grids");
  if (!(coarse.gamma > fine.gamma))
    throw StructuralError("coarse splitting must have the larger forward exponent on its kernel");
  NestednessReport rep;
  rep.tol = tol;
  const Mat id = Mat::Identity(coarse.dim, coarse.dim);
  for (int k = 0; k < coarse.grid.n_nodes(); ++k) {
    const Mat& qc = coarse.projections[k];
    const Mat& qf = fine.projections[k];
    rep.image_residual = std::max(rep.image_residual, op_norm((id - qc) * qf));
    rep.kernel_residual = std::max(rep.kernel_residual, op_norm(qf * (id - qc)));
  }
  rep.pass = rep.image_residual <= tol && rep.kernel_residual <= tol;
  return rep;
}

ShiftedDichotomy shift_to_dichotomy(const Generator& proc, const SplittingCertificate& cert) {
  const double c = 0.5 * (cert.gamma + cert.rho);
  SplittingCertificate shifted = cert;
  shifted.gamma = 0.5 * (cert.gamma - cert.rho);
  shifted.rho = -shifted.gamma;
  for (double& e : shifted.exponents) e += c;
  return ShiftedDichotomy{proc.linear_only().shifted(c), shifted, c};
}

}  // namespace invman
