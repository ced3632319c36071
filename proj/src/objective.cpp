#include "kmanifold/objective.hpp"

#include <cmath>
#include <limits>

#include "kmanifold/errors.hpp"
#include "kmanifold/subproblem.hpp"

namespace kmanifold {

namespace {

void validate_problem(const Matrix& X, int K, int r, double mu) {
  if (K < 2 || r <= K) throw InvalidArgument("need r > K >= 2");
  if (X.rows() < r) throw InvalidArgument("need n >= r");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive and finite");
  if (!X.allFinite()) throw InvalidArgument("data matrix has non-finite entries");
}

bool strictly_interior(const Matrix& U) { return U.allFinite() && (U.array() > 0.0).all(); }

}  // namespace

Problem::Problem(Matrix X, int K, int r, double mu)
    : Problem(std::make_shared<const Matrix>(std::move(X)), K, r, mu) {}

Problem::Problem(std::shared_ptr<const Matrix> X, int K, int r, double mu)
    : X_(std::move(X)), K_(K), r_(r), mu_(mu) {
  if (!X_) throw InvalidArgument("null data matrix");
  validate_problem(*X_, K_, r_, mu_);
}

Vector svec(const Matrix& S) {
  const Eigen::Index r = S.rows();
  Vector v(r * (r + 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index b = 0; b < r; ++b)
    for (Eigen::Index a = b; a < r; ++a) v(idx++) = (a == b) ? S(a, a) : std::sqrt(2.0) * S(a, b);
  return v;
}

Matrix smat(const Vector& v, Eigen::Index r) {
  Matrix S(r, r);
  Eigen::Index idx = 0;
  for (Eigen::Index b = 0; b < r; ++b)
    for (Eigen::Index a = b; a < r; ++a) {
      const double value = (a == b) ? v(idx) : v(idx) / std::sqrt(2.0);
      S(a, b) = value;
      S(b, a) = value;
      ++idx;
    }
  return S;
}

double loss(const Problem& problem, const ManifoldPoint& point) {
  return static_cast<double>(loss_extended(problem, point));
}

long double loss_extended(const Problem& problem, const ManifoldPoint& point) {
  const Matrix& X = problem.X();
  const Matrix& V = point.V();
  const Matrix& Q = point.Q();
  const Eigen::Index r = point.r();
  const long double inv_sqrt_n = 1.0L / std::sqrt(static_cast<long double>(V.rows()));
  // U assembled in extended precision: small entries are sums of much
  // larger terms.
  long double barrier = 0.0L;
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      long double u = inv_sqrt_n * Q(0, j);
      for (Eigen::Index a = 1; a < r; ++a) u += static_cast<long double>(V(i, a - 1)) * Q(a, j);
      if (!(u > 0.0L) || !std::isfinite(static_cast<double>(u))) return std::numeric_limits<long double>::infinity();
      barrier += std::log(u);
    }
  }
  long double data = 0.0L;
  for (Eigen::Index k = 0; k < V.cols(); ++k) {
    for (Eigen::Index l = 0; l < X.cols(); ++l) {
      long double s = 0.0L;
      for (Eigen::Index i = 0; i < X.rows(); ++i) s += static_cast<long double>(X(i, l)) * V(i, k);
      data += s * s;
    }
  }
  return -data - problem.mu() * barrier;
}

long double loss_change(const Problem& problem, const ManifoldPoint& from, const ManifoldPoint& to,
                        const Multipliers& y) {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = from.n();
  const Eigen::Index r = from.r();
  const LMatrix X = problem.X().cast<long double>();
  const LMatrix V0 = from.V().cast<long double>();
  const LMatrix V1 = to.V().cast<long double>();
  const LMatrix Q0 = from.Q().cast<long double>();
  const LMatrix Q1 = to.Q().cast<long double>();
  const LMatrix dV = V1 - V0;
  const LMatrix dQ = Q1 - Q0;

  LMatrix Vhat0(n, r);
  Vhat0.col(0).setConstant(1.0L / std::sqrt(static_cast<long double>(n)));
  Vhat0.rightCols(r - 1) = V0;
  const LMatrix U0 = Vhat0 * Q0;
  const LMatrix dU = dV * Q1.bottomRows(r - 1) + Vhat0 * dQ;
  long double barrier = 0.0L;
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const long double ratio = dU(i, j) / U0(i, j);
      if (!(ratio > -1.0L) || !std::isfinite(static_cast<double>(ratio)))
        return std::numeric_limits<long double>::infinity();
      barrier += std::log1p(ratio);
    }
  }
  const long double data = ((X.transpose() * dV).array() * (X.transpose() * (V1 + V0)).array()).sum();

  long double residual = 0.0L;
  const LMatrix colsum = dV.colwise().sum();
  for (Eigen::Index k = 0; k < r - 1; ++k) residual += y.y1(k) * colsum(0, k);
  residual += y.y2 * (dV.array() * (V1 + V0).array()).sum();
  const LMatrix dQQ = dQ * Q1.transpose() + Q0 * dQ.transpose();
  residual += (smat(y.y3, r).cast<long double>().array() * dQQ.array()).sum();

  return -data - problem.mu() * barrier - residual;
}

Multipliers multipliers(const ManifoldPoint& point, const Matrix& G_V, const Matrix& G_Q) {
  const Matrix& V = point.V();
  const Matrix& Q = point.Q();
  Multipliers y;
  y.y1 = G_V.colwise().sum().transpose() / static_cast<double>(point.n());
  y.y2 = (G_V.array() * V.array()).sum() / (2.0 * (point.K() - 1));
  y.y3 = 0.25 * svec(G_Q * Q.transpose() + Q * G_Q.transpose());
  return y;
}

PointEvaluation evaluate(const Problem& problem, const ManifoldPoint& point) {
  PointEvaluation e;
  e.U = assemble(point);
  if (!strictly_interior(e.U)) throw NonInteriorPoint("assembled U has non-positive entries");
  const Matrix& X = problem.X();
  const Matrix& V = point.V();
  const Matrix& Q = point.Q();
  const Eigen::Index r = point.r();
  const double mu = problem.mu();

  e.Uinv = e.U.cwiseInverse();
  e.Uinv2 = e.Uinv.cwiseAbs2();
  e.Vhat = augmented_v(V);
  e.loss = loss(problem, point);

  const Matrix XtV = X.transpose() * V;
  e.euclidean.G_V = -2.0 * (X * XtV) - mu * (e.Uinv * Q.transpose()).rightCols(r - 1);
  e.euclidean.G_Q = -mu * (e.Vhat.transpose() * e.Uinv);

  e.multipliers = multipliers(point, e.euclidean.G_V, e.euclidean.G_Q);
  e.gradient = project_tangent(point, e.euclidean.G_V, e.euclidean.G_Q);
  e.radial = 2.0 * e.multipliers.y2;
  e.sym_gq = 0.5 * (e.euclidean.G_Q * Q.transpose() + Q * e.euclidean.G_Q.transpose());
  return e;
}

EuclideanGradient euclidean_gradient(const Problem& problem, const ManifoldPoint& point) {
  return evaluate(problem, point).euclidean;
}

TangentVector riemannian_gradient(const Problem& problem, const ManifoldPoint& point) {
  return evaluate(problem, point).gradient;
}

TangentVector riemannian_gradient_closed_form(const ManifoldPoint& point, const EuclideanGradient& g) {
  const Matrix& V = point.V();
  const Matrix& Q = point.Q();
  const double n = static_cast<double>(point.n());
  const Vector ones = Vector::Ones(point.n());
  TangentVector out;
  out.Vdot = g.G_V - ones * (ones.transpose() * g.G_V) / n -
             ((g.G_V.array() * V.array()).sum() / (point.K() - 1)) * V;
  out.Qdot = 0.5 * (g.G_Q * Q.transpose() - Q * g.G_Q.transpose()) * Q;
  return out;
}

TangentVector hessian_vecprod(const Problem& problem, const ManifoldPoint& point, const TangentVector& xi) {
  return hessian_vecprod(problem, point, evaluate(problem, point), xi);
}

TangentVector hessian_vecprod(const Problem& problem, const ManifoldPoint& point, const PointEvaluation& e,
                              const TangentVector& xi) {
  const Matrix& X = problem.X();
  const Matrix& Q = point.Q();
  const Eigen::Index r = point.r();
  const double mu = problem.mu();

  const Matrix Udot = xi.Vdot * Q.bottomRows(r - 1) + e.Vhat * xi.Qdot;
  const Matrix W = e.Uinv2.cwiseProduct(Udot);

  Matrix hv = -2.0 * (X * (X.transpose() * xi.Vdot));
  hv += mu * ((W * Q.transpose()).rightCols(r - 1) - (e.Uinv * xi.Qdot.transpose()).rightCols(r - 1));
  hv -= e.radial * xi.Vdot;

  Matrix hq = mu * (e.Vhat.transpose() * W);
  hq.bottomRows(r - 1) -= mu * (xi.Vdot.transpose() * e.Uinv);
  hq -= e.sym_gq * xi.Qdot;

  return project_tangent(point, hv, hq);
}

Matrix constraint_jacobian(const ManifoldPoint& point) {
  const Eigen::Index n = point.n();
  const Eigen::Index r = point.r();
  const Eigen::Index p = r - 1;
  const Eigen::Index m = constraint_count(r);
  const Matrix& V = point.V();
  const Matrix& Q = point.Q();
  Matrix J = Matrix::Zero(m, variable_count(n, r));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) {
      J(k, i * p + k) = 1.0;
      J(p, i * p + k) = V(i, k);
    }
  }
  const Eigen::Index off = n * p;
  Eigen::Index row = r;
  for (Eigen::Index b = 0; b < r; ++b) {
    for (Eigen::Index a = b; a < r; ++a, ++row) {
      for (Eigen::Index c = 0; c < r; ++c) {
        if (a == b) {
          J(row, off + a + r * c) = 2.0 * Q(a, c);
        } else {
          J(row, off + a + r * c) = std::sqrt(2.0) * Q(b, c);
          J(row, off + b + r * c) = std::sqrt(2.0) * Q(a, c);
        }
      }
    }
  }
  return J;
}

HessianBlocks hessian_blocks(const Problem& problem, const ManifoldPoint& point, double lambda) {
  return hessian_blocks(problem, point, evaluate(problem, point), lambda);
}

HessianBlocks hessian_blocks(const Problem& problem, const ManifoldPoint& point, const PointEvaluation& e,
                             double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  HessianBlocks h;
  h.n = point.n();
  h.r = point.r();
  h.d = problem.d();
  h.m = constraint_count(h.r);
  h.lambda = lambda;
  h.data = problem.data();

  const Eigen::Index n = h.n;
  const Eigen::Index r = h.r;
  const Eigen::Index p = r - 1;
  const Eigen::Index rr = r * r;
  const double mu = problem.mu();
  const Matrix& V = point.V();
  const Matrix Qh = point.Q().bottomRows(p);

  // V-block: barrier curvature plus the sphere multiplier term, per sample.
  h.d11.resize(p, n * p);
  const Matrix shift = (lambda - e.radial) * Matrix::Identity(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    h.d11.middleCols(i * p, p) =
        mu * (Qh * e.Uinv2.row(i).transpose().asDiagonal() * Qh.transpose()) + shift;
  }

  // Coupling H_vq and the transposed V-constraint rows.
  h.k12 = Matrix::Zero(n * p, rr + h.m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) {
      const Eigen::Index row = i * p + k;
      for (Eigen::Index b = 0; b < r; ++b) {
        const double w = mu * e.Uinv2(i, b) * Qh(k, b);
        for (Eigen::Index a = 0; a < r; ++a) h.k12(row, a + r * b) = w * e.Vhat(i, a);
        h.k12(row, (k + 1) + r * b) -= mu * e.Uinv(i, b);
      }
      h.k12(row, rr + k) = 1.0;
      h.k12(row, rr + p) = V(i, k);
    }
  }

  // Q-block: one r x r block per column of Q, plus the orthogonality
  // multiplier term and the Q-constraint rows.
  h.k22 = Matrix::Zero(rr + h.m, rr + h.m);
  for (Eigen::Index b = 0; b < r; ++b) {
    h.k22.block(r * b, r * b, r, r) =
        mu * (e.Vhat.transpose() * e.Uinv2.col(b).asDiagonal() * e.Vhat) - e.sym_gq +
        lambda * Matrix::Identity(r, r);
  }
  const Matrix J = constraint_jacobian(point);
  const Eigen::Index mq = h.m - r;
  const Matrix Jq = J.bottomRightCorner(mq, rr);
  h.k22.block(rr + r, 0, mq, rr) = Jq;
  h.k22.block(0, rr + r, rr, mq) = Jq.transpose();
  return h;
}

HessianBlocks HessianBlocks::shifted(double new_lambda) const {
  if (!(new_lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  HessianBlocks out = *this;
  const double delta = new_lambda - lambda;
  const Eigen::Index pp = p();
  for (Eigen::Index i = 0; i < n; ++i)
    out.d11.middleCols(i * pp, pp).diagonal().array() += delta;
  out.k22.topLeftCorner(r * r, r * r).diagonal().array() += delta;
  out.lambda = new_lambda;
  return out;
}

Vector HessianBlocks::b_transpose_times(const Vector& v) const {
  const Eigen::Index pp = p();
  const Matrix Vd = v.head(n * pp).reshaped(pp, n);  // = Vdot^T
  const Matrix Z = std::sqrt(2.0) * (Vd * (*data));   // (r-1) x d
  return Z.reshaped();
}

Vector HessianBlocks::b_times(const Vector& z) const {
  const Eigen::Index pp = p();
  const Matrix Z = z.reshaped(pp, d);
  const Matrix out = std::sqrt(2.0) * (Z * data->transpose());  // (r-1) x n = (X Z^T)^T
  return out.reshaped();
}

Vector HessianBlocks::apply(const Vector& u) const {
  const Eigen::Index pp = p();
  const Eigen::Index nv = n * pp;
  const Eigen::Index rr = r * r;
  const auto v = u.head(nv);
  const auto q = u.tail(rr);
  Vector out(nv + rr);
  for (Eigen::Index i = 0; i < n; ++i)
    out.segment(i * pp, pp).noalias() = d11.middleCols(i * pp, pp) * v.segment(i * pp, pp);
  out.head(nv) -= b_times(b_transpose_times(u.head(nv)));
  out.head(nv).noalias() += k12.leftCols(rr) * q;
  out.tail(rr).noalias() = k12.leftCols(rr).transpose() * v;
  out.tail(rr).noalias() += k22.topLeftCorner(rr, rr) * q;
  return out;
}

Matrix HessianBlocks::dense_kkt() const {
  const Eigen::Index pp = p();
  const Eigen::Index nv = n * pp;
  const Eigen::Index s2 = r * r + m;
  Matrix K = Matrix::Zero(nv + s2, nv + s2);
  for (Eigen::Index i = 0; i < n; ++i) K.block(i * pp, i * pp, pp, pp) = d11.middleCols(i * pp, pp);
  Matrix B = Matrix::Zero(nv, d * pp);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < d; ++l)
      for (Eigen::Index k = 0; k < pp; ++k) B(i * pp + k, l * pp + k) = std::sqrt(2.0) * (*data)(i, l);
  K.topLeftCorner(nv, nv) -= B * B.transpose();
  K.topRightCorner(nv, s2) = k12;
  K.bottomLeftCorner(s2, nv) = k12.transpose();
  K.bottomRightCorner(s2, s2) = k22;
  return K;
}

double min_hessian_eigenvalue(const Problem& problem, const ManifoldPoint& point) {
  return min_hessian_eigenvalue(problem, point, null_space_basis(point));
}

double min_hessian_eigenvalue(const Problem& problem, const ManifoldPoint& point, const Matrix& basis) {
  const HessianBlocks h = hessian_blocks(problem, point, 0.0);
  Matrix HN(basis.rows(), basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) HN.col(j) = h.apply(basis.col(j));
  Matrix reduced = basis.transpose() * HN;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace kmanifold
