#include "kmanifold/initialization.hpp"

#include <cmath>
#include <string>

#include "kmanifold/errors.hpp"

namespace kmanifold {

namespace {

Matrix block_matrix(Eigen::Index r, Eigen::Index p, double x, double y, double z, double w) {
  Matrix B(r, r);
  B.topLeftCorner(p, p).setConstant(y);
  B.topLeftCorner(p, p).diagonal().setConstant(x);
  B.topRightCorner(p, r - p).setConstant(z);
  B.bottomLeftCorner(r - p, p).setConstant(y);
  B.bottomRightCorner(r - p, r - p).setConstant(z);
  B.bottomRightCorner(r - p, r - p).diagonal().setConstant(w);
  return B;
}

Matrix stack_rows(const Matrix& B, Eigen::Index n) {
  Matrix U(n, B.cols());
  for (Eigen::Index i = 0; i < n; ++i) U.row(i) = B.row(i % B.rows());
  return U;
}

double manifold_residual(const Matrix& U, int K) {
  const Vector ones = Vector::Ones(U.rows());
  const double row = (U * (U.transpose() * ones) - ones).cwiseAbs().maxCoeff();
  return std::max(row, std::abs(U.squaredNorm() - K));
}

}  // namespace

InteriorSpec interior_spec(Eigen::Index n, Eigen::Index r, int K) {
  if (K < 2) throw InvalidArgument("need K >= 2");
  if (r <= K) {
    throw RankNotOverparameterized("no interior point exists for r <= K (r=" + std::to_string(r) +
                                   ", K=" + std::to_string(K) + ")");
  }
  if (n < r) throw InvalidArgument("need n >= r");

  InteriorSpec s;
  s.n = n;
  s.r = r;
  s.K = K;
  const double rd = static_cast<double>(r);
  const Eigen::Index q = n / r;
  const Eigen::Index p = n % r;

  if (p == 0) {
    s.kind = InteriorCase::divisible;
    s.x = (1.0 + std::sqrt((rd - 1.0) * (K - 1.0))) / rd;
    s.y = (std::sqrt(rd - 1.0) - std::sqrt(K - 1.0)) / (rd * std::sqrt(rd - 1.0));
    Matrix U0 = Matrix::Constant(r, r, s.y);
    U0.diagonal().setConstant(s.x);
    s.U = stack_rows(U0 / std::sqrt(static_cast<double>(q)), n);
  } else {
    s.kind = InteriorCase::nondivisible;
    const double nd = static_cast<double>(n), qd = static_cast<double>(q), pd = static_cast<double>(p);
    const double a1 = nd * rd - qd * rd + pd - pd * (2 * qd + 1) / nd;
    const double a2 = 2 * pd * (1 + 2 * qd - nd) / nd;
    const double a3 = nd - pd * (2 * qd + 1) / nd;
    const double b1 = (rd + pd / nd - 1) * (nd - qd);
    const double b2 = (1 - pd / nd) * (nd - qd) + qd * (rd + pd / nd - 1);
    const double b3 = qd * (1 - pd / nd);
    const double c1 = -static_cast<double>(K), c2 = -1.0;
    const double den = a1 * b2 - a2 * b1;
    const double a = (a3 * b1 - a1 * b3) / den;
    const double b = (c1 * b1 - a1 * c2) / den;
    // Quadratic in w^2.
    const double qa = b1 * a * a + b2 * a + b3;
    const double qb = 2 * a * b * b1 + b * b2 + c2;
    const double qc = b * b * b1;
    const double disc = qb * qb - 4 * qa * qc;

    bool found = false;
    for (double sign : {1.0, -1.0}) {
      if (!(disc >= 0.0)) break;
      const double w2 = (-qb + sign * std::sqrt(disc)) / (2 * qa);
      if (!(w2 > 0.0)) continue;
      const double w = std::sqrt(w2);
      const double z = a * w + b / w;
      const double x = (1 - 1 / nd) * w + z / nd;
      const double y = (1 + 1 / nd) * z - w / nd;
      if (!(x > 0 && y > 0 && z > 0 && w > 0)) continue;
      Matrix U = stack_rows(block_matrix(r, p, x, y, z, w), n);
      if (manifold_residual(U, K) > 1e-9) continue;
      s.x = x;
      s.y = y;
      s.z = z;
      s.w = w;
      s.U = std::move(U);
      found = true;
      break;
    }
    if (!found) {
      throw CoefficientNegative("no positive interior-point coefficients for n=" + std::to_string(n) +
                                ", r=" + std::to_string(r) + ", K=" + std::to_string(K) + "; n is too small");
    }
  }
  s.margin = s.U.minCoeff();
  return s;
}

ManifoldPoint interior_point(Eigen::Index n, Eigen::Index r, int K) { return factor_U(interior_spec(n, r, K).U, K); }

ManifoldPoint factor_U(const Matrix& U, int K, double tol) {
  const Eigen::Index n = U.rows();
  const Eigen::Index r = U.cols();
  if (n < r || r < 2) throw InvalidArgument("factor_U needs n >= r >= 2");
  const double residual = manifold_residual(U, K);
  if (!(residual <= tol)) throw NotOnManifold("U violates U U^T 1 = 1 or ||U||^2 = K (residual " +
                                              std::to_string(residual) + ")");

  Eigen::JacobiSVD<Matrix> svd(U, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix& P = svd.matrixU();
  const double sign = P(0, 0) < 0 ? -1.0 : 1.0;
  const Matrix PS = P * svd.singularValues().asDiagonal();
  Matrix V = sign * PS.rightCols(r - 1);
  Matrix Q = sign * svd.matrixV().transpose();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const bool first_is_ones = ((sign * PS.col(0)).array() - scale).abs().maxCoeff() <= 1e-9;

  if (!first_is_ones) {
    // 1/sqrt(n) is not the leading singular direction (or it is degenerate):
    // take q1 = U^T 1/sqrt(n), a unit vector since U U^T 1 = 1, and complete it.
    const Vector q1 = U.transpose() * Vector::Constant(n, scale);
    Eigen::HouseholderQR<Matrix> qr(q1);
    Matrix basis = qr.householderQ() * Matrix::Identity(r, r);
    if (basis.col(0).dot(q1) < 0) basis.col(0) *= -1.0;
    Q = basis.transpose();
    V = (U * basis).rightCols(r - 1);
  }
  ManifoldPoint point(std::move(V), std::move(Q), K);
  if ((assemble(point) - U).cwiseAbs().maxCoeff() > 1e-9 + tol) throw NotOnManifold("factorization did not reproduce U");
  return point;
}

ManifoldPoint perturbed_init(Eigen::Index n, Eigen::Index r, int K, double scale, std::uint64_t seed) {
  const ManifoldPoint base = interior_point(n, r, K);
  if (!(scale > 0.0)) return base;
  const TangentVector direction = random_tangent(base, seed);
  for (int k = 0; k < 60; ++k, scale *= 0.5) {
    try {
      ManifoldPoint candidate = retract(base, direction * scale);
      if (assemble(candidate).minCoeff() > 0.0) return candidate;
    } catch (const DegenerateRetraction&) {
    }
  }
  return base;
}

}  // namespace kmanifold
