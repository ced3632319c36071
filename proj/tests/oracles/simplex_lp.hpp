#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Phase-one simplex with Bland's rule: is {x >= 0 : A x = b} nonempty?
/// Dense tableau; meant for a few dozen variables.
inline bool lp_feasible(Eigen::MatrixXd A, Eigen::VectorXd b, double tol = 1e-9) {
  const Eigen::Index m = A.rows();
  const Eigen::Index nv = A.cols();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) < 0) {
      A.row(i) *= -1.0;
      b(i) *= -1.0;
    }
  }
  // Columns: original variables, then one artificial per row, then rhs.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, nv + m + 1);
  T.topLeftCorner(m, nv) = A;
  T.block(0, nv, m, m).setIdentity();
  T.col(nv + m).head(m) = b;
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = nv + i;
  // Objective row: minimize the sum of artificials, expressed in nonbasics.
  for (Eigen::Index i = 0; i < m; ++i) T.row(m) -= T.row(i);
  T.block(m, nv, 1, m).setZero();

  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < nv + m; ++j) {
      if (T(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > tol) {
        const double ratio = T(i, nv + m) / T(i, enter);
        if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded in phase one cannot happen; defensive
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    basis[leave] = enter;
  }
  return -T(m, nv + m) <= tol;
}

}  // namespace oracle
