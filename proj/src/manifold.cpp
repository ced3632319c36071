#include "kmanifold/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kmanifold/errors.hpp"
#include "kmanifold/random.hpp"

namespace kmanifold {

ManifoldPoint::ManifoldPoint(Matrix V, Matrix Q, int K) : V_(std::move(V)), Q_(std::move(Q)), K_(K) {
  const Eigen::Index r = Q_.rows();
  if (Q_.cols() != r) throw InvalidArgument("Q must be square");
  if (V_.cols() != r - 1) throw InvalidArgument("V must have r-1 columns");
  if (K_ < 2 || r <= K_) {
    throw InvalidArgument("need r > K >= 2 (r=" + std::to_string(r) + ", K=" + std::to_string(K_) + ")");
  }
  if (V_.rows() < r) throw InvalidArgument("need n >= r");
}

TangentVector TangentVector::zero(const ManifoldPoint& at) {
  return {Matrix::Zero(at.n(), at.r() - 1), Matrix::Zero(at.r(), at.r())};
}

double TangentVector::dot(const TangentVector& other) const {
  return (Vdot.array() * other.Vdot.array()).sum() + (Qdot.array() * other.Qdot.array()).sum();
}

Vector vectorize(const TangentVector& t) {
  const Eigen::Index n = t.Vdot.rows();
  const Eigen::Index p = t.Vdot.cols();
  const Eigen::Index r = t.Qdot.rows();
  Vector u(n * p + r * r);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < p; ++k) u(i * p + k) = t.Vdot(i, k);
  u.tail(r * r) = t.Qdot.reshaped();
  return u;
}

TangentVector devectorize(const Vector& u, Eigen::Index n, Eigen::Index r) {
  const Eigen::Index p = r - 1;
  TangentVector t{Matrix(n, p), Matrix(r, r)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < p; ++k) t.Vdot(i, k) = u(i * p + k);
  t.Qdot = u.tail(r * r).reshaped(r, r);
  return t;
}

Matrix augmented_v(const Matrix& V) {
  Matrix out(V.rows(), V.cols() + 1);
  out.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(V.rows())));
  out.rightCols(V.cols()) = V;
  return out;
}

Matrix assemble(const ManifoldPoint& point) { return augmented_v(point.V()) * point.Q(); }

TangentVector project_tangent(const ManifoldPoint& point, const Matrix& W_V, const Matrix& W_Q) {
  const Matrix& V = point.V();
  const Matrix& Q = point.Q();
  Matrix pv = W_V.rowwise() - W_V.colwise().mean();
  // V is centered, so <centered W, V> = <W, V>.
  pv -= ((W_V.array() * V.array()).sum() / (point.K() - 1)) * V;
  Matrix pq = 0.5 * (W_Q * Q.transpose() - Q * W_Q.transpose()) * Q;
  return {std::move(pv), std::move(pq)};
}

Matrix project_sphere(const Matrix& A, int K) {
  Matrix centered = A.rowwise() - A.colwise().mean();
  const double norm = centered.norm();
  if (!(norm >= 1e-14)) throw DegenerateRetraction("centered V component vanished");
  return (std::sqrt(static_cast<double>(K - 1)) / norm) * centered;
}

Matrix project_orthogonal(const Matrix& B) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(B * B.transpose());
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || !(ev.minCoeff() > 1e-28 * top)) throw DegenerateRetraction("Q + Qdot is singular");
  const Matrix& E = eig.eigenvectors();
  return E * ev.cwiseSqrt().cwiseInverse().asDiagonal() * E.transpose() * B;
}

ManifoldPoint retract(const ManifoldPoint& point, const TangentVector& xi) {
  return ManifoldPoint(project_sphere(point.V() + xi.Vdot, point.K()), project_orthogonal(point.Q() + xi.Qdot),
                       point.K());
}

double FeasibilityReport::max_residual() const { return std::max({centering, sphere, orthogonality}); }

FeasibilityReport check_feasibility(const ManifoldPoint& point, double tolerance) {
  FeasibilityReport report;
  report.tolerance = tolerance;
  report.centering = point.V().colwise().sum().cwiseAbs().maxCoeff();
  report.sphere = std::abs(point.V().squaredNorm() - (point.K() - 1));
  const Eigen::Index r = point.r();
  report.orthogonality = (point.Q() * point.Q().transpose() - Matrix::Identity(r, r)).norm();
  return report;
}

double tangent_residual(const ManifoldPoint& point, const TangentVector& xi) {
  const double scale = std::max(xi.norm(), 1e-300);
  const double n = static_cast<double>(point.n());
  const double centering = xi.Vdot.colwise().sum().cwiseAbs().maxCoeff() / std::sqrt(n);
  const double radial = std::abs((xi.Vdot.array() * point.V().array()).sum()) / point.V().norm();
  const double skew = (point.Q() * xi.Qdot.transpose() + xi.Qdot * point.Q().transpose()).norm();
  return std::max({centering, radial, skew}) / scale;
}

TangentVector random_tangent(const ManifoldPoint& point, std::uint64_t seed) {
  Rng rng(seed);
  Matrix wv(point.n(), point.r() - 1);
  Matrix wq(point.r(), point.r());
  for (Eigen::Index j = 0; j < wv.cols(); ++j)
    for (Eigen::Index i = 0; i < wv.rows(); ++i) wv(i, j) = rng.normal();
  for (Eigen::Index j = 0; j < wq.cols(); ++j)
    for (Eigen::Index i = 0; i < wq.rows(); ++i) wq(i, j) = rng.normal();
  TangentVector t = project_tangent(point, wv, wq);
  return t * (1.0 / t.norm());
}

}  // namespace kmanifold
