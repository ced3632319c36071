#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace kmanifold {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A point (V, Q) on the product manifold  Sphere x O(r), where
///
///   V in R^{n x (r-1)},  1^T V = 0,  ||V||_F^2 = K - 1
///   Q in R^{r x r},      Q Q^T = I
///
/// The constructor checks shapes and the size relations r > K >= 2,
/// n >= r. Feasibility is reported by check_feasibility(), not enforced.
class ManifoldPoint {
 public:
  ManifoldPoint(Matrix V, Matrix Q, int K);

  const Matrix& V() const { return V_; }
  const Matrix& Q() const { return Q_; }
  int K() const { return K_; }
  Eigen::Index n() const { return V_.rows(); }
  Eigen::Index r() const { return Q_.rows(); }

 private:
  Matrix V_;
  Matrix Q_;
  int K_;
};

/// A tangent vector (Vdot, Qdot) at some ManifoldPoint. The base point is
/// not stored; operations take it alongside.
struct TangentVector {
  Matrix Vdot;
  Matrix Qdot;

  static TangentVector zero(const ManifoldPoint& at);

  double dot(const TangentVector& other) const;
  double norm() const { return std::sqrt(dot(*this)); }

  TangentVector operator+(const TangentVector& o) const { return {Vdot + o.Vdot, Qdot + o.Qdot}; }
  TangentVector operator-(const TangentVector& o) const { return {Vdot - o.Vdot, Qdot - o.Qdot}; }
  TangentVector operator*(double s) const { return {Vdot * s, Qdot * s}; }
};

inline TangentVector operator*(double s, const TangentVector& t) { return t * s; }

/// Number of scalar constraints: 1^T V (r-1), ||V||^2 (1), svec(QQ^T) (r(r+1)/2).
inline Eigen::Index constraint_count(Eigen::Index r) { return (r - 1) + 1 + r * (r + 1) / 2; }

/// Length of the vectorized variable u = [vec(V^T); vec(Q)].
inline Eigen::Index variable_count(Eigen::Index n, Eigen::Index r) { return n * (r - 1) + r * r; }

/// u = [vec(Vdot^T); vec(Qdot)]: the V part is grouped per sample so the
/// V-block of the Hessian is block-diagonal.
Vector vectorize(const TangentVector& t);
TangentVector devectorize(const Vector& u, Eigen::Index n, Eigen::Index r);

/// U = [1/sqrt(n) * 1_n, V] Q, the n x r factor of the membership matrix.
Matrix assemble(const ManifoldPoint& point);

/// [1/sqrt(n) * 1_n, V]  (n x r).
Matrix augmented_v(const Matrix& V);

/// Orthogonal projection of (W_V, W_Q) onto the tangent space at point.
TangentVector project_tangent(const ManifoldPoint& point, const Matrix& W_V, const Matrix& W_Q);
inline TangentVector project_tangent(const ManifoldPoint& point, const TangentVector& w) {
  return project_tangent(point, w.Vdot, w.Qdot);
}

/// Metric projection retraction
///   (V, Q) -> (P_sphere(V + Vdot), (B B^T)^{-1/2} B),  B = Q + Qdot.
/// Throws DegenerateRetraction when the centered V + Vdot vanishes or B is
/// singular.
ManifoldPoint retract(const ManifoldPoint& point, const TangentVector& xi);

/// Nearest point of the centered sphere {1^T V = 0, ||V||^2 = K-1}.
Matrix project_sphere(const Matrix& A, int K);
/// Polar factor (B B^T)^{-1/2} B.
Matrix project_orthogonal(const Matrix& B);

struct FeasibilityReport {
  double centering = 0.0;      ///< max_k |1^T V_k|
  double sphere = 0.0;         ///< | ||V||_F^2 - (K-1) |
  double orthogonality = 0.0;  ///< ||Q Q^T - I||_F
  double tolerance = 1e-8;
  bool ok() const { return centering <= tolerance && sphere <= tolerance && orthogonality <= tolerance; }
  double max_residual() const;
};

FeasibilityReport check_feasibility(const ManifoldPoint& point, double tolerance = 1e-8);

/// Residuals of a tangent vector against the three linearized constraints,
/// relative to ||xi|| * scale of the base point.
double tangent_residual(const ManifoldPoint& point, const TangentVector& xi);

/// Unit-norm tangent vector, deterministic per seed.
TangentVector random_tangent(const ManifoldPoint& point, std::uint64_t seed);

}  // namespace kmanifold
