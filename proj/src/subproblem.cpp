#include "kmanifold/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "kmanifold/errors.hpp"

namespace kmanifold {

namespace {

constexpr double kMaxCondition = 1e14;

struct SymmetricFactor {
  Matrix inverse;
  Eigen::Index negatives = 0;
};

// Symmetric row-max equilibration first: the barrier and the shift spread
// the entries over many orders of magnitude, which would otherwise read as
// singularity. Congruence keeps the inertia.
SymmetricFactor factor_symmetric(const Matrix& A, const char* what) {
  Vector scale = A.cwiseAbs().rowwise().maxCoeff();
  for (Eigen::Index i = 0; i < scale.size(); ++i) scale(i) = scale(i) > 0.0 ? 1.0 / std::sqrt(scale(i)) : 1.0;
  const Matrix scaled = scale.asDiagonal() * A * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scaled);
  if (eig.info() != Eigen::Success) throw SingularSystem(std::string(what) + ": eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  const double smallest = ev.cwiseAbs().minCoeff();
  if (!std::isfinite(largest) || !(smallest * kMaxCondition > largest)) {
    throw SingularSystem(std::string(what) + " is numerically singular");
  }
  SymmetricFactor f;
  f.negatives = (ev.array() < 0.0).count();
  const Matrix& E = eig.eigenvectors();
  const Matrix SE = scale.asDiagonal() * E;
  f.inverse = SE * ev.cwiseInverse().asDiagonal() * SE.transpose();
  return f;
}

}  // namespace

StepSolution solve_saddle(const SaddleSystem& system) { return solve_saddle(system.blocks, system.g); }

// Eliminates V block by block. Off-diagonal coupling is L12 = [K12, B]
// with B = sqrt(2) (X kron I_p), so the B parts of L12^T D11^-1 L12 reduce
// to weighted Gram matrices of X.
StepSolution solve_saddle(const HessianBlocks& h, const Vector& g) {
  const Eigen::Index n = h.n;
  const Eigen::Index d = h.d;
  const Eigen::Index p = h.p();
  const Eigen::Index nv = n * p;
  const Eigen::Index rr = h.r * h.r;
  const Eigen::Index s2 = rr + h.m;
  const Eigen::Index size = s2 + h.lifted_size();
  if (g.size() != nv + rr) throw InvalidArgument("gradient has wrong length");
  const Matrix& X = *h.data;
  const double root2 = std::sqrt(2.0);
  // Columns of K12 past the Q, V^T 1 and ||V||^2 columns are zero.
  const Eigen::Index kw = std::min(s2, rr + p + 1);
  const auto k12 = h.k12.leftCols(kw);

  Matrix d11_inv(p, nv);
  Matrix dk(nv, kw);  // D11^-1 K12
  Vector dg(nv);      // D11^-1 g_v
  Eigen::Index negatives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    SymmetricFactor f = factor_symmetric(h.d11.middleCols(i * p, p), "diagonal block");
    negatives += f.negatives;
    d11_inv.middleCols(i * p, p) = f.inverse;
    dk.middleRows(i * p, p).noalias() = f.inverse * k12.middleRows(i * p, p);
    dg.segment(i * p, p).noalias() = f.inverse * g.segment(i * p, p);
  }

  Matrix schur = Matrix::Zero(size, size);
  schur.topLeftCorner(s2, s2) = h.k22;
  schur.topLeftCorner(kw, kw).noalias() -= k12.transpose() * dk;
  schur.bottomRightCorner(h.lifted_size(), h.lifted_size()).setIdentity();
  Vector rhs = Vector::Zero(size);
  rhs.head(rr) = -g.tail(rr);
  rhs.head(kw).noalias() += k12.transpose() * dg;

  // Row k of every p-block, as n-row views.
  using Strided = Eigen::Map<const Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
  for (Eigen::Index k = 0; k < p; ++k) {
    const Strided dk_k(dk.data() + k, n, kw, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(dk.outerStride(), p));
    const Matrix cross = root2 * dk_k.transpose() * X;  // kw x d
    for (Eigen::Index l = 0; l < d; ++l) schur.col(s2 + l * p + k).head(kw) -= cross.col(l);
    Vector dg_k(n);
    for (Eigen::Index i = 0; i < n; ++i) dg_k(i) = dg(i * p + k);
    const Vector xg = root2 * X.transpose() * dg_k;
    for (Eigen::Index l = 0; l < d; ++l) rhs(s2 + l * p + k) += xg(l);
    for (Eigen::Index k2 = 0; k2 <= k; ++k2) {
      Vector w(n);
      for (Eigen::Index i = 0; i < n; ++i) w(i) = d11_inv(k, i * p + k2);
      const Matrix gram = 2.0 * X.transpose() * w.asDiagonal() * X;
      for (Eigen::Index l = 0; l < d; ++l)
        for (Eigen::Index l2 = 0; l2 < d; ++l2) {
          schur(s2 + l * p + k, s2 + l2 * p + k2) -= gram(l, l2);
          if (k2 != k) schur(s2 + l2 * p + k2, s2 + l * p + k) -= gram(l, l2);
        }
    }
  }
  schur.bottomLeftCorner(h.lifted_size(), s2) = schur.topRightCorner(s2, h.lifted_size()).transpose();

  SymmetricFactor sf = factor_symmetric(schur, "Schur complement");
  negatives += sf.negatives;
  const Vector w = sf.inverse * rhs;

  // u_v = D11^-1 (-g_v - K12 w_K - B w_B)
  Vector rest = -g.head(nv);
  rest.noalias() -= k12 * w.head(kw);
  const Eigen::Map<const Matrix> wb(w.data() + s2, p, d);  // column l holds the p-block for X column l
  const Matrix bw = root2 * wb * X.transpose();             // p x n
  for (Eigen::Index i = 0; i < n; ++i) rest.segment(i * p, p) -= bw.col(i);
  Vector u(nv + rr);
  for (Eigen::Index i = 0; i < n; ++i)
    u.segment(i * p, p).noalias() = d11_inv.middleCols(i * p, p) * rest.segment(i * p, p);
  u.tail(rr) = w.head(rr);

  StepSolution s;
  s.p = devectorize(u, h.n, h.r);
  s.norm_p = u.norm();
  s.lambda = h.lambda;
  s.multipliers = w.segment(rr, h.m);
  s.negative_eigenvalues = negatives;
  s.constraint_rows = h.m;
  return s;
}

std::vector<double> step_norm_curve(const HessianBlocks& blocks, const Vector& g, std::span<const double> lambdas) {
  std::vector<double> norms;
  norms.reserve(lambdas.size());
  for (double lam : lambdas) norms.push_back(solve_saddle(blocks.shifted(lam), g).norm_p);
  return norms;
}

StepSolution bisect_cubic_step(const HessianBlocks& blocks, const Vector& g, double L,
                               const CubicStepOptions& options) {
  if (!(L > 0.0)) throw InvalidArgument("cubic weight L must be positive");
  if (g.norm() == 0.0) {
    StepSolution zero;
    zero.p = devectorize(Vector::Zero(g.size()), blocks.n, blocks.r);
    zero.lambda = 0.0;
    zero.multipliers = Vector::Zero(blocks.m);
    zero.constraint_rows = zero.negative_eigenvalues = blocks.m;
    return zero;
  }

  auto probe = [&](double lam) -> std::optional<StepSolution> {
    try {
      StepSolution s = solve_saddle(blocks.shifted(lam), g);
      if (!s.reduced_positive_definite()) return std::nullopt;
      return s;
    } catch (const SingularSystem&) {
      return std::nullopt;
    }
  };
  auto residual = [&](const StepSolution& s) { return 2.0 * s.lambda - L * s.norm_p; };
  auto converged = [&](const StepSolution& s) {
    return std::abs(residual(s)) <= options.stationarity_tol * std::max(1.0, L * s.norm_p);
  };

  double lo = options.lambda_floor;
  if (auto s = probe(lo)) {
    if (converged(*s) || residual(*s) > 0.0) return *s;
  }

  double hi = std::max(1.0, 2.0 * lo);
  std::optional<StepSolution> upper;
  for (int k = 0; k < options.max_doublings; ++k, hi *= 2.0) {
    upper = probe(hi);
    if (upper && residual(*upper) > 0.0) break;
    lo = hi;
    upper.reset();
  }
  if (!upper) throw BracketingFailure("no upper bracket for the cubic step after doubling");
  if (converged(*upper)) return *upper;

  for (int k = 0; k < options.max_bisections; ++k) {
    const double mid = (hi > 4.0 * lo && lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    auto s = probe(mid);
    if (!s || residual(*s) < 0.0) {
      lo = mid;
      if (s && converged(*s)) return *s;
    } else {
      hi = mid;
      upper = std::move(s);
      if (converged(*upper)) return *upper;
    }
  }
  return *upper;
}

StepSolution bisect_cubic_step(const Problem& problem, const ManifoldPoint& point, double L,
                               const CubicStepOptions& options) {
  const PointEvaluation eval = evaluate(problem, point);
  return bisect_cubic_step(hessian_blocks(problem, point, eval, 0.0), vectorize(eval.gradient), L, options);
}

Matrix null_space_basis(const ManifoldPoint& point) {
  const Matrix J = constraint_jacobian(point);
  const Eigen::Index total = J.cols();
  const Eigen::Index m = J.rows();
  Eigen::HouseholderQR<Matrix> qr(J.transpose());
  const Matrix full = qr.householderQ() * Matrix::Identity(total, total);
  return full.rightCols(total - m);
}

}  // namespace kmanifold
