#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace phasescope {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec to_vec(std::span<const double> x) {
  Vec v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[i];
  return v;
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// <x> = sqrt(1 + |x|^2).
inline double japanese(std::span<const double> x) { return std::sqrt(1.0 + dot(x, x)); }
inline double japanese(double x) { return std::sqrt(1.0 + x * x); }

/// Validates symmetry to 1e-12 (relative to the largest entry) and returns
/// the symmetrized matrix.
inline Mat checked_symmetric(const Mat& b, const std::string& what) {
  if (b.rows() != b.cols()) throw ValidationError(what + ": matrix must be square");
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError(what + ": matrix is not symmetric");
  return 0.5 * (b + b.transpose());
}

inline void check_invertible(const Mat& a, const std::string& what) {
  if (a.rows() != a.cols()) throw ValidationError(what + ": matrix must be square");
  if (std::abs(a.determinant()) <= 1e-12) throw ValidationError(what + ": matrix is singular");
}

/// True when the matrix has no coupling between [0, k) and [k, n).
inline bool is_block_diagonal(const Mat& a, Eigen::Index k) {
  const Eigen::Index n = a.rows();
  if (k == 0 || k == n) return true;
  return a.topRightCorner(k, n - k).cwiseAbs().maxCoeff() == 0.0 &&
         a.bottomLeftCorner(n - k, k).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace phasescope
