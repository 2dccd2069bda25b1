#pragma once

// Linear subspaces Y of R^d with the conormal space N(Y) = Y x Y^perp.

#include <Eigen/QR>

#include "linalg.hpp"

namespace phasescope {

struct SubspaceSpec {
  std::size_t d = 0;
  std::size_t n = 0;
  Mat basis;  // d x n, orthonormal columns spanning Y
  Mat perp;   // d x (d - n), orthonormal columns spanning Y^perp

  Mat proj() const { return basis * basis.transpose(); }
  Mat proj_perp() const { return perp * perp.transpose(); }

  /// 2d x d basis of N(Y) = Y x Y^perp.
  Mat conormal_basis() const {
    Mat b = Mat::Zero(static_cast<Eigen::Index>(2 * d), static_cast<Eigen::Index>(d));
    auto dd = static_cast<Eigen::Index>(d), nn = static_cast<Eigen::Index>(n);
    b.block(0, 0, dd, nn) = basis;
    b.block(dd, nn, dd, dd - nn) = perp;
    return b;
  }
  /// 2d x d basis of the default transversal V = N(Y^perp).
  Mat transversal_basis() const {
    Mat b = Mat::Zero(static_cast<Eigen::Index>(2 * d), static_cast<Eigen::Index>(d));
    auto dd = static_cast<Eigen::Index>(d), nn = static_cast<Eigen::Index>(n);
    b.block(0, 0, dd, dd - nn) = perp;
    b.block(dd, dd - nn, dd, nn) = basis;
    return b;
  }

  /// dist((x, xi), N(Y)) = |(pi_{Y^perp} x, pi_Y xi)|
  double dist_conormal(const Vec& x, const Vec& xi) const {
    return std::sqrt((perp.transpose() * x).squaredNorm() + (basis.transpose() * xi).squaredNorm());
  }
  /// dist((x, xi), N(Y^perp)) = |(pi_Y x, pi_{Y^perp} xi)|
  double dist_transversal(const Vec& x, const Vec& xi) const {
    return std::sqrt((basis.transpose() * x).squaredNorm() + (perp.transpose() * xi).squaredNorm());
  }

  SubspaceSpec orthogonal_complement() const { return {d, d - n, perp, basis}; }
};

/// Orthonormalizes the columns of `vectors` (d x n). An empty column set gives Y = {0}.
inline SubspaceSpec make_subspace(const Mat& vectors) {
  const Eigen::Index d = vectors.rows(), n = vectors.cols();
  if (d < 1) throw DimensionError("make_subspace: ambient dimension must be >= 1");
  if (n > d) throw ValidationError("make_subspace: more vectors than the ambient dimension");
  if (n > 0) {
    Eigen::ColPivHouseholderQR<Mat> qr(vectors);
    qr.setThreshold(1e-10);
    if (qr.rank() < n) throw ValidationError("make_subspace: basis vectors are linearly dependent");
  }
  Mat full = Mat::Identity(d, d);
  if (n > 0) {
    Eigen::HouseholderQR<Mat> qr(vectors);
    full = qr.householderQ() * Mat::Identity(d, d);
    // keep the orientation of the given vectors
    Mat r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r(j, j) < 0) full.col(j) *= -1.0;
  }
  SubspaceSpec s;
  s.d = static_cast<std::size_t>(d);
  s.n = static_cast<std::size_t>(n);
  s.basis = full.leftCols(n);
  s.perp = full.rightCols(d - n);
  return s;
}

/// Y = R^n x {0} inside R^d.
inline SubspaceSpec coordinate_subspace(std::size_t d, std::size_t n) {
  Mat b = Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  return make_subspace(b.leftCols(static_cast<Eigen::Index>(n)));
}

/// Diagonal {(x, x)} inside R^{2d}.
inline SubspaceSpec diagonal_subspace(std::size_t d) {
  auto dd = static_cast<Eigen::Index>(d);
  Mat b = Mat::Zero(2 * dd, dd);
  for (Eigen::Index j = 0; j < dd; ++j) b(j, j) = b(j + dd, j) = 1.0 / std::sqrt(2.0);
  return make_subspace(b);
}

}  // namespace phasescope
