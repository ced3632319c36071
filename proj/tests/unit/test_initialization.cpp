#include <doctest.h>

#include <cmath>
#include <vector>

#include "../oracles/instances.hpp"
#include "../oracles/tangent_cone.hpp"
#include "kmanifold/errors.hpp"
#include "kmanifold/initialization.hpp"

using namespace kmanifold;

namespace {

double membership_residual(const Matrix& U, int K) {
  const Vector ones = Vector::Ones(U.rows());
  return std::max((U * (U.transpose() * ones) - ones).cwiseAbs().maxCoeff(), std::abs(U.squaredNorm() - K));
}

}  // namespace

TEST_CASE("divisible analytic interior point") {
  const InteriorSpec s = interior_spec(6, 3, 2);
  CHECK(s.kind == InteriorCase::divisible);
  CHECK(s.x == doctest::Approx((1.0 + std::sqrt(2.0)) / 3.0).epsilon(1e-14));
  CHECK(s.x == doctest::Approx(0.804738).epsilon(1e-6));
  CHECK(s.y == doctest::Approx((2.0 - std::sqrt(2.0)) / 6.0).epsilon(1e-14));
  CHECK(std::abs(s.x + 2.0 * s.y - 1.0) <= 1e-12);
  CHECK(std::abs(s.x * s.x + 2.0 * s.y * s.y - 2.0 / 3.0) <= 1e-12);
  CHECK(s.U.minCoeff() > 0.0);
  CHECK(s.margin == doctest::Approx(s.U.minCoeff()));
  CHECK(membership_residual(s.U, 2) <= 1e-12);
  const ManifoldPoint x = interior_point(6, 3, 2);
  CHECK(check_feasibility(x, 1e-12).ok());
  CHECK((assemble(x) - s.U).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("nondivisible analytic interior point") {
  const InteriorSpec s = interior_spec(7, 3, 2);
  CHECK(s.kind == InteriorCase::nondivisible);
  CHECK(s.x > 0.0);
  CHECK(s.y > 0.0);
  CHECK(s.z > 0.0);
  CHECK(s.w > 0.0);
  CHECK(s.U.minCoeff() > 0.0);
  CHECK(membership_residual(s.U, 2) <= 1e-10);
  const ManifoldPoint x = interior_point(7, 3, 2);
  CHECK(check_feasibility(x, 1e-9).ok());
  CHECK((assemble(x) - s.U).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("analytic interior points across shapes") {
  for (Eigen::Index n : {12, 13, 25, 50, 101, 500})
    for (int K : {2, 3, 4})
      for (int r = K + 1; r <= 2 * K; ++r) {
        CAPTURE(n);
        CAPTURE(K);
        CAPTURE(r);
        InteriorSpec s;
        try {
          s = interior_spec(n, r, K);
        } catch (const CoefficientNegative&) {
          CHECK(n < 50);  // only small n may lack a positive root
          continue;
        }
        CHECK(s.U.minCoeff() > 0.0);
        CHECK(membership_residual(s.U, K) <= 1e-9);
        CHECK(check_feasibility(interior_point(n, r, K), 1e-9).ok());
      }
}

TEST_CASE("interior point argument errors") {
  CHECK_THROWS_AS(interior_spec(10, 3, 3), RankNotOverparameterized);
  CHECK_THROWS_AS(interior_spec(13, 5, 4), CoefficientNegative);
  CHECK_THROWS_AS(interior_spec(3, 4, 2), InvalidArgument);
}

TEST_CASE("factor_U round-trips") {
  const InteriorSpec s = interior_spec(10, 4, 3);
  const ManifoldPoint x = factor_U(s.U, 3);
  CHECK((assemble(x) - s.U).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(check_feasibility(x, 1e-12).ok());

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [problem, y] = oracle::random_instance(11, 2, 3, 5, 0.1, seed, 1.5);
    const Matrix U = assemble(y);
    const ManifoldPoint back = factor_U(U, 3);
    CHECK((assemble(back) - U).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(check_feasibility(back, 1e-10).ok());
  }
  CHECK_THROWS_AS(factor_U(2.0 * s.U, 3), NotOnManifold);
}

TEST_CASE("perturbed start") {
  const ManifoldPoint a = perturbed_init(20, 4, 3, 0.0, 1);
  const ManifoldPoint base = interior_point(20, 4, 3);
  CHECK((a.V() - base.V()).norm() == 0.0);
  CHECK((a.Q() - base.Q()).norm() == 0.0);
  const ManifoldPoint b = perturbed_init(20, 4, 3, 0.4, 9);
  const ManifoldPoint c = perturbed_init(20, 4, 3, 0.4, 9);
  CHECK(b.V() == c.V());
  CHECK(b.Q() == c.Q());
  const ManifoldPoint big = perturbed_init(500, 5, 4, 0.1, 3);
  CHECK(assemble(big).minCoeff() > 0.0);
  CHECK(check_feasibility(big, 1e-10).ok());
}

TEST_CASE("tangent cone at a group assignment has no interior direction at r = K") {
  int checked = 0;
  for (int K = 2; K <= 4; ++K)
    for (int n = K; n <= 12; n += 2) {
      const std::vector<int> groups = oracle::spread_groups(n, K);
      CAPTURE(n);
      CAPTURE(K);
      CHECK_FALSE(oracle::tangent_cone_nontrivial(oracle::assignment_factor(groups, K, K)));
      // One spare column opens a direction, so the LP is not vacuous.
      CHECK(oracle::tangent_cone_nontrivial(oracle::assignment_factor(groups, K, K + 1)));
      ++checked;
    }
  CHECK(checked > 10);
}
