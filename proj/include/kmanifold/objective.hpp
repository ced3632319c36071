#pragma once

#include <memory>

#include "kmanifold/manifold.hpp"

namespace kmanifold {

/// Penalized clustering objective
///
///   f(V, Q) = -||X^T V||_F^2 - mu * sum_ij log U_ij,   U = [1/sqrt(n) 1, V] Q
///
/// over the product manifold. The Gram matrix X X^T is never formed.
class Problem {
 public:
  Problem(Matrix X, int K, int r, double mu);
  Problem(std::shared_ptr<const Matrix> X, int K, int r, double mu);

  const Matrix& X() const { return *X_; }
  const std::shared_ptr<const Matrix>& data() const { return X_; }
  int K() const { return K_; }
  int r() const { return r_; }
  double mu() const { return mu_; }
  Eigen::Index n() const { return X_->rows(); }
  Eigen::Index d() const { return X_->cols(); }

 private:
  std::shared_ptr<const Matrix> X_;
  int K_;
  int r_;
  double mu_;
};

struct EuclideanGradient {
  Matrix G_V;  ///< n x (r-1)
  Matrix G_Q;  ///< r x r
};

/// Closed-form least-squares multipliers (sign convention: the normal part
/// of the gradient is L*(y) with L*_V(y1, y2) = 1 y1^T + 2 y2 V and
/// L*_Q(y3) = 2 smat(y3) Q). The Lagrange multipliers are their negation.
struct Multipliers {
  Vector y1;  ///< r-1
  double y2 = 0.0;
  Vector y3;  ///< r(r+1)/2, symmetric vectorization
};

/// Symmetric vectorization with sqrt(2) off-diagonal weights, lower
/// triangle in column-major order, so that <svec A, svec B> = <A, B>.
Vector svec(const Matrix& symmetric);
Matrix smat(const Vector& v, Eigen::Index r);

/// Objective value; +infinity when some U_ij <= 0 (the point is outside the
/// barrier's domain). Accumulates in extended precision so that loss
/// differences near convergence stay above roundoff.
double loss(const Problem& problem, const ManifoldPoint& point);
long double loss_extended(const Problem& problem, const ManifoldPoint& point);

/// (f - y^T c)(to) - (f - y^T c)(from), where c are the constraint
/// residuals (zero on the manifold) and y fixed multipliers. Computed from
/// the differences to - from so that the error scales with the change, not
/// with |f|; the y^T c term cancels the first-order effect of rounding off
/// the manifold. +infinity when `to` is not strictly interior.
long double loss_change(const Problem& problem, const ManifoldPoint& from, const ManifoldPoint& to,
                        const Multipliers& y);

/// All first-order quantities at a strictly interior point, computed once
/// and reused by the Hessian routines.
struct PointEvaluation {
  Matrix U;       ///< assembled factor
  Matrix Uinv;    ///< elementwise 1 / U
  Matrix Uinv2;   ///< elementwise 1 / U^2
  Matrix Vhat;    ///< [1/sqrt(n) 1, V]
  double loss = 0.0;
  EuclideanGradient euclidean;
  Multipliers multipliers;
  TangentVector gradient;  ///< Riemannian gradient
  double radial = 0.0;     ///< <G_V, V> / (K - 1)
  Matrix sym_gq;           ///< (G_Q Q^T + Q G_Q^T) / 2
};

/// Throws NonInteriorPoint unless every entry of U is positive.
PointEvaluation evaluate(const Problem& problem, const ManifoldPoint& point);

EuclideanGradient euclidean_gradient(const Problem& problem, const ManifoldPoint& point);

Multipliers multipliers(const ManifoldPoint& point, const Matrix& G_V, const Matrix& G_Q);

/// Riemannian gradient, i.e. the tangent projection of the Euclidean one.
TangentVector riemannian_gradient(const Problem& problem, const ManifoldPoint& point);

/// Same quantity via the explicit multiplier formulas; kept as an
/// independent route for consistency checks.
TangentVector riemannian_gradient_closed_form(const ManifoldPoint& point, const EuclideanGradient& g);

/// Riemannian Hessian applied to a tangent vector, matrix-free: O(n r (r + d)).
TangentVector hessian_vecprod(const Problem& problem, const ManifoldPoint& point, const TangentVector& xi);
TangentVector hessian_vecprod(const Problem& problem, const ManifoldPoint& point, const PointEvaluation& eval,
                              const TangentVector& xi);

/// Structured Lagrangian Hessian in the ordering u = [vec(V^T); vec(Q)],
/// together with the constraint Jacobian rows:
///
///   [ D11 - B B^T   H_vq          J_v^T ]
///   [ H_qv          H_qq + lam I  J_q^T ]
///   [ J_v           J_q           0     ]
///
/// D11 is block-diagonal with n blocks of size r-1 and B = sqrt(2) (X kron I).
/// The trailing unknowns are x2 = [vec(Qdot); y_v (r); y_q (r(r+1)/2)].
struct HessianBlocks {
  Eigen::Index n = 0, r = 0, d = 0, m = 0;
  double lambda = 0.0;
  Matrix d11;  ///< (r-1) x n(r-1); block i is middleCols(i*(r-1), r-1), includes +lambda I
  Matrix k12;  ///< n(r-1) x (r^2 + m) = [H_vq, J_v^T, 0]
  Matrix k22;  ///< (r^2 + m) x (r^2 + m)
  std::shared_ptr<const Matrix> data;  ///< X, defines the factor B

  Eigen::Index p() const { return r - 1; }
  Eigen::Index num_variables() const { return n * (r - 1) + r * r; }
  Eigen::Index lifted_size() const { return d * (r - 1); }

  /// Copy with the diagonal shift replaced by new_lambda. O(n r).
  HessianBlocks shifted(double new_lambda) const;

  /// (H + lambda I) u for a vectorized variable u (constraint rows ignored).
  Vector apply(const Vector& u) const;

  /// B^T v and B z without forming B.
  Vector b_transpose_times(const Vector& v) const;
  Vector b_times(const Vector& z) const;

  /// Full (n(r-1) + r^2 + m) square KKT matrix. Small problems only.
  Matrix dense_kkt() const;
};

HessianBlocks hessian_blocks(const Problem& problem, const ManifoldPoint& point, double lambda);
HessianBlocks hessian_blocks(const Problem& problem, const ManifoldPoint& point, const PointEvaluation& eval,
                             double lambda);

/// Dense m x (n(r-1) + r^2) Jacobian of the tangent-space constraints, with
/// rows ordered as in HessianBlocks.
Matrix constraint_jacobian(const ManifoldPoint& point);

/// Smallest eigenvalue of N^T H N for an orthonormal null-space basis N of
/// the constraint Jacobian. Dense; meant for diagnostics with n up to ~2000.
double min_hessian_eigenvalue(const Problem& problem, const ManifoldPoint& point);
double min_hessian_eigenvalue(const Problem& problem, const ManifoldPoint& point, const Matrix& basis);

}  // namespace kmanifold
