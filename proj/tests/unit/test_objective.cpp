#include <doctest.h>

#include <cmath>

#include "../oracles/finite_difference.hpp"
#include "../oracles/instances.hpp"
#include "kmanifold/errors.hpp"
#include "kmanifold/subproblem.hpp"

using namespace kmanifold;

TEST_CASE("riemannian gradient matches finite differences along retraction curves") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [problem, x] = oracle::random_instance(12, 3, 3, 4, 0.1, seed);
    const TangentVector g = riemannian_gradient(problem, x);
    for (std::uint64_t k = 0; k < 3; ++k) {
      const TangentVector xi = random_tangent(x, seed * 31 + k);
      const double fd = oracle::directional_derivative(problem, x, xi);
      CHECK(std::abs(fd - g.dot(xi)) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("hessian vector product matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [problem, x] = oracle::random_instance(12, 3, 3, 4, 0.1, seed);
    const TangentVector xi = random_tangent(x, seed + 100);
    const TangentVector hv = hessian_vecprod(problem, x, xi);
    const TangentVector fd = oracle::hessian_by_gradient_difference(problem, x, xi);
    CHECK(oracle::relative_error(vectorize(hv), vectorize(fd)) <= 1e-5);
    const double curvature = oracle::second_directional_derivative(problem, x, xi);
    CHECK(std::abs(curvature - xi.dot(hv)) <= 1e-4 * std::max(1.0, std::abs(curvature)));
  }
}

TEST_CASE("loss with zero data is the pure barrier") {
  const ManifoldPoint x = interior_point(6, 3, 2);
  const Problem problem(Matrix::Zero(6, 2), 2, 3, 0.3);
  const Matrix U = assemble(x);
  CHECK(U.maxCoeff() < 1.0);
  const double expected = -0.3 * U.array().log().sum();
  CHECK(expected > 0.0);
  CHECK(loss(problem, x) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("loss matches an entry-by-entry evaluation") {
  const ManifoldPoint x = interior_point(6, 3, 2);
  const Problem problem(Matrix::Identity(6, 6), 2, 3, 0.1);
  double data = 0.0, barrier = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 3; ++j) {
      double u = x.Q()(0, j) / std::sqrt(6.0);
      for (int k = 0; k < 2; ++k) u += x.V()(i, k) * x.Q()(k + 1, j);
      barrier += std::log(u);
    }
  }
  for (int l = 0; l < 6; ++l)
    for (int k = 0; k < 2; ++k) {
      double s = 0.0;
      for (int i = 0; i < 6; ++i) s += (i == l ? 1.0 : 0.0) * x.V()(i, k);
      data += s * s;
    }
  CHECK(loss(problem, x) == doctest::Approx(-data - 0.1 * barrier).epsilon(1e-13));
}

TEST_CASE("loss is infinite outside the positive orthant") {
  auto [problem, x] = oracle::random_instance(8, 2, 2, 3, 0.1, 2);
  const Matrix Q = -x.Q();
  CHECK(std::isinf(loss(problem, ManifoldPoint(x.V(), Q, 2))));
  CHECK_THROWS_AS(evaluate(problem, ManifoldPoint(x.V(), Q, 2)), NonInteriorPoint);
}

TEST_CASE("multipliers of simple gradients") {
  auto [problem, x] = oracle::random_instance(8, 2, 3, 4, 0.1, 4);
  const Multipliers zero = multipliers(x, Matrix::Zero(8, 3), Matrix::Zero(4, 4));
  CHECK(zero.y1.isZero());
  CHECK(zero.y2 == 0.0);
  CHECK(zero.y3.isZero());
  const Multipliers radial = multipliers(x, x.V(), Matrix::Zero(4, 4));
  CHECK(radial.y1.norm() <= 1e-12);
  CHECK(radial.y2 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("objective constant on the manifold has zero riemannian gradient") {
  // X X^T = c I makes the data term -c (K - 1); a negligible barrier remains.
  const ManifoldPoint x = interior_point(7, 4, 3);
  const Problem problem(2.0 * Matrix::Identity(7, 7), 3, 4, 1e-14);
  const EuclideanGradient g = euclidean_gradient(problem, x);
  CHECK((g.G_V + 2.0 * 4.0 * x.V()).norm() <= 1e-10);
  CHECK(riemannian_gradient(problem, x).norm() <= 1e-10);
}

TEST_CASE("two gradient routes agree") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [problem, x] = oracle::random_instance(10, 3, 3, 5, 0.2, seed);
    const TangentVector a = riemannian_gradient(problem, x);
    const TangentVector b = riemannian_gradient_closed_form(x, euclidean_gradient(problem, x));
    CHECK((a - b).norm() <= 1e-10 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("loss change agrees with the difference of losses") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [problem, x] = oracle::random_instance(10, 3, 3, 4, 0.2, seed);
    const PointEvaluation e = evaluate(problem, x);
    const ManifoldPoint y = retract(x, 1e-4 * random_tangent(x, seed));
    REQUIRE(assemble(y).minCoeff() > 0.0);
    const long double direct = loss_extended(problem, y) - loss_extended(problem, x);
    const long double change = loss_change(problem, x, y, e.multipliers);
    CHECK(static_cast<double>(std::fabs(direct - change)) <= 1e-10 * std::max(1.0, std::abs(static_cast<double>(direct))));
    const ManifoldPoint outside(x.V(), -x.Q(), x.K());
    CHECK(std::isinf(static_cast<double>(loss_change(problem, x, outside, e.multipliers))));
  }
}

TEST_CASE("hessian blocks reproduce the matrix-free product") {
  auto [problem, x] = oracle::random_instance(10, 3, 3, 4, 0.1, 21);
  const PointEvaluation e = evaluate(problem, x);
  const HessianBlocks h = hessian_blocks(problem, x, e, 0.0);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const TangentVector xi = random_tangent(x, s);
    const Vector hv = vectorize(hessian_vecprod(problem, x, e, xi));
    const Vector hb = h.apply(vectorize(xi));
    const Matrix N = null_space_basis(x);
    CHECK(oracle::relative_error(N.transpose() * hb, N.transpose() * hv) <= 1e-10);
  }
}

TEST_CASE("zero data removes the B factor") {
  const ManifoldPoint x = interior_point(6, 3, 2);
  const Problem problem(Matrix::Zero(6, 2), 2, 3, 0.1);
  const HessianBlocks h = hessian_blocks(problem, x, 0.0);
  CHECK(h.b_times(Vector::Ones(h.lifted_size())).isZero());
}

TEST_CASE("min hessian eigenvalue matches a dense projected eigensolve") {
  auto [problem, x] = oracle::random_instance(8, 2, 2, 3, 0.1, 17);
  const Matrix N = null_space_basis(x);
  Matrix HN(N.rows(), N.cols());
  for (Eigen::Index j = 0; j < N.cols(); ++j)
    HN.col(j) = vectorize(hessian_vecprod(problem, x, devectorize(N.col(j), 8, 3)));
  Matrix R = N.transpose() * HN;
  R = 0.5 * (R + R.transpose()).eval();
  const double expected = Eigen::SelfAdjointEigenSolver<Matrix>(R).eigenvalues().minCoeff();
  CHECK(min_hessian_eigenvalue(problem, x) == doctest::Approx(expected).epsilon(1e-9));
}
