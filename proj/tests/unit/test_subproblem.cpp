#include <doctest.h>

#include <vector>

#include "../oracles/dense_kkt.hpp"
#include "../oracles/small_instances.hpp"
#include "kmanifold/errors.hpp"
#include "kmanifold/subproblem.hpp"

using namespace kmanifold;

using oracle::small_instance;

TEST_CASE("structured saddle solve matches the dense KKT solve") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto [problem, x] = small_instance(seed);
    CAPTURE(seed);
    const PointEvaluation e = evaluate(problem, x);
    const double lambda = std::vector<double>{0.1, 1.0, 10.0}[seed % 3];
    const HessianBlocks h = hessian_blocks(problem, x, e, lambda);
    const Vector g = vectorize(e.gradient);
    const StepSolution s = solve_saddle(h, g);
    CHECK(oracle::relative_error(vectorize(s.p), oracle::dense_kkt_step(h, g)) <= 1e-8);
    CHECK(s.negative_eigenvalues == oracle::dense_kkt_negatives(h));
    CHECK(tangent_residual(x, s.p) <= 1e-8);
  }
}

TEST_CASE("inertia flags a positive definite reduced hessian") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [problem, x] = small_instance(seed);
    const double lmin = min_hessian_eigenvalue(problem, x);
    const PointEvaluation e = evaluate(problem, x);
    const Vector g = vectorize(e.gradient);
    const HessianBlocks h = hessian_blocks(problem, x, e, 0.0);
    CHECK(solve_saddle(h.shifted(-lmin + 1e-3 * (1 + std::abs(lmin))), g).reduced_positive_definite());
    if (lmin > 1e-3) continue;
    CHECK_FALSE(solve_saddle(h.shifted(-lmin - 1e-3 * (1 + std::abs(lmin))), g).reduced_positive_definite());
  }
}

TEST_CASE("step norm decreases in the shift") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [problem, x] = small_instance(seed);
    const PointEvaluation e = evaluate(problem, x);
    const HessianBlocks h = hessian_blocks(problem, x, e, 0.0);
    const Vector g = vectorize(e.gradient);
    const double start = std::max(0.0, -min_hessian_eigenvalue(problem, x)) + 1e-2;
    std::vector<double> lambdas;
    for (double f : {1.0, 3.0, 10.0, 100.0, 1000.0}) lambdas.push_back(start * f);
    const std::vector<double> norms = step_norm_curve(h, g, lambdas);
    for (std::size_t i = 1; i < norms.size(); ++i) CHECK(norms[i] < norms[i - 1]);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("zero gradient gives a zero step") {
  auto [problem, x] = small_instance(4);
  const HessianBlocks h = hessian_blocks(problem, x, 1.0);
  const Vector g = Vector::Zero(h.num_variables());
  CHECK(solve_saddle(h, g).norm_p == 0.0);
  const std::vector<double> lambdas{1.0, 10.0};
  for (double v : step_norm_curve(h, g, lambdas)) CHECK(v == 0.0);
  const StepSolution cubic = bisect_cubic_step(h, g, 5.0);
  CHECK(cubic.norm_p == 0.0);
  CHECK(cubic.lambda == 0.0);
}

TEST_CASE("large shift approaches the scaled gradient") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [problem, x] = small_instance(seed);
    const PointEvaluation e = evaluate(problem, x);
    const Vector g = vectorize(e.gradient);
    const StepSolution s = solve_saddle(hessian_blocks(problem, x, e, 1e8), g);
    const double ratio = s.norm_p / (g.norm() / 1e8);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
}

TEST_CASE("cubic step is stationary and decreases the model") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [problem, x] = small_instance(seed);
    const PointEvaluation e = evaluate(problem, x);
    const HessianBlocks h = hessian_blocks(problem, x, e, 0.0);
    const Vector g = vectorize(e.gradient);
    for (double L : {0.1, 10.0, 1000.0}) {
      const StepSolution s = bisect_cubic_step(h, g, L);
      CAPTURE(seed);
      CAPTURE(L);
      CHECK(s.reduced_positive_definite());
      CHECK(std::abs(2.0 * s.lambda - L * s.norm_p) <= 1e-6 * std::max(1.0, L * s.norm_p));
      const Vector p = vectorize(s.p);
      const double model = g.dot(p) + 0.5 * p.dot(h.apply(p)) + L / 6.0 * std::pow(s.norm_p, 3);
      CHECK(model < 0.0);
    }
  }
}

TEST_CASE("cubic step rejects a nonpositive weight") {
  auto [problem, x] = small_instance(2);
  CHECK_THROWS_AS(bisect_cubic_step(problem, x, 0.0), InvalidArgument);
}

TEST_CASE("null space basis is orthonormal and annihilated by the jacobian") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [problem, x] = small_instance(seed);
    const Matrix N = null_space_basis(x);
    const Matrix J = constraint_jacobian(x);
    CHECK(N.cols() == variable_count(x.n(), x.r()) - constraint_count(x.r()));
    CHECK((N.transpose() * N - Matrix::Identity(N.cols(), N.cols())).norm() <= 1e-12);
    CHECK((J * N).norm() <= 1e-12 * J.norm());
    const Eigen::JacobiSVD<Matrix> svd(J);
    CHECK(svd.singularValues().minCoeff() > 1e-5);
  }
}

TEST_CASE("gradient of the wrong length is rejected") {
  auto [problem, x] = small_instance(3);
  const HessianBlocks h = hessian_blocks(problem, x, 1.0);
  CHECK_THROWS_AS(solve_saddle(h, Vector::Zero(3)), InvalidArgument);
}
