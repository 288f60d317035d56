#pragma once

#include <Eigen/Dense>

namespace sv {

inline constexpr double kRankRelTol = 1e-9;

/// Orthonormal basis of the null space of C (rows = constraints). Rank is
/// decided at kRankRelTol relative to the largest singular value; constraint
/// rows here scale uniformly (like 1/h for divergence-value rows), so the
/// relative threshold realizes the h-scaled rank rule.
inline Eigen::MatrixXd orthonormal_nullspace(const Eigen::MatrixXd& C) {
  int n = int(C.cols());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  if (C.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kRankRelTol * smax) ++rank;
  if (smax == 0.0) rank = 0;
  return svd.matrixV().rightCols(n - rank);
}

inline int numerical_rank(const Eigen::MatrixXd& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  double smax = svd.singularValues()(0);
  if (smax == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kRankRelTol * smax) ++rank;
  return rank;
}

inline double smallest_singular_value(const Eigen::MatrixXd& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace sv
