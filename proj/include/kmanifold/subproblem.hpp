#pragma once

#include <span>
#include <vector>

#include "kmanifold/objective.hpp"

namespace kmanifold {

/// Shifted saddle-point system
///
///   [ H + lam I   A^T ] [ p ]   [ -g ]
///   [ A           0   ] [ y ] = [  0 ]
///
/// with H, A and lam taken from `blocks` and g the vectorized Riemannian
/// gradient (length n(r-1) + r^2).
struct SaddleSystem {
  HessianBlocks blocks;
  Vector g;
};

struct StepSolution {
  TangentVector p;
  double norm_p = 0.0;
  double lambda = 0.0;
  Vector multipliers;  ///< constraint multipliers y (length m)
  /// Negative eigenvalues of the full KKT matrix. Equal to m exactly when the
  /// shifted Hessian is positive definite on the tangent space.
  Eigen::Index negative_eigenvalues = 0;
  Eigen::Index constraint_rows = 0;

  /// True iff lambda > -lambda_min of the projected Hessian.
  bool reduced_positive_definite() const { return negative_eigenvalues == constraint_rows; }
};

/// Solves the saddle system in O(n) time. The -B B^T correction is lifted
/// into an auxiliary block, the n diagonal blocks of D11 are factorized by
/// symmetric eigendecomposition, and the remaining
/// (r^2 + m + d(r-1))-sized Schur complement is solved densely.
///
/// Throws SingularSystem when a diagonal block or the Schur complement has
/// condition number above 1e14.
StepSolution solve_saddle(const SaddleSystem& system);
StepSolution solve_saddle(const HessianBlocks& blocks, const Vector& g);

/// ||p(lam)|| for each lam.
std::vector<double> step_norm_curve(const HessianBlocks& blocks, const Vector& g, std::span<const double> lambdas);

struct CubicStepOptions {
  double stationarity_tol = 1e-6;
  int max_bisections = 60;
  int max_doublings = 60;
  double lambda_floor = 1e-8;
};

/// Step of the cubic-regularized model  g^T p + p^T H p / 2 + L/6 ||p||^3
/// over the tangent space: bisection on lam for 2 lam = L ||p(lam)||.
/// A trial lam counts as too small when the KKT inertia shows the shifted
/// projected Hessian is not positive definite, or the solve is singular.
StepSolution bisect_cubic_step(const HessianBlocks& blocks, const Vector& g, double L,
                               const CubicStepOptions& options = {});
StepSolution bisect_cubic_step(const Problem& problem, const ManifoldPoint& point, double L,
                               const CubicStepOptions& options = {});

/// Orthonormal basis of the kernel of constraint_jacobian(point). Dense.
Matrix null_space_basis(const ManifoldPoint& point);

}  // namespace kmanifold
