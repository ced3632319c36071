#pragma once

#include <cstdint>

#include "kmanifold/manifold.hpp"

namespace kmanifold {

enum class InteriorCase { divisible, nondivisible };

/// Coefficients of the analytic interior point. In the divisible case
/// U = (1/sqrt(q)) 1_q kron U0 with U0 = (x - y) I + y 11^T; otherwise U
/// stacks q + 1 copies of a two-level block matrix B(x, y, z, w) and keeps
/// the first n rows (z and w unused in the divisible case).
struct InteriorSpec {
  Eigen::Index n = 0, r = 0;
  int K = 0;
  InteriorCase kind = InteriorCase::divisible;
  double x = 0.0, y = 0.0, z = 0.0, w = 0.0;
  Matrix U;
  double margin = 0.0;  ///< min_ij U_ij
};

/// Throws RankNotOverparameterized for r <= K and CoefficientNegative when
/// no admissible root is positive (n too small).
InteriorSpec interior_spec(Eigen::Index n, Eigen::Index r, int K);

/// interior_spec(...).U factored onto the product manifold.
ManifoldPoint interior_point(Eigen::Index n, Eigen::Index r, int K);

/// Writes a feasible U as [1/sqrt(n) 1, V] Q. Throws NotOnManifold when
/// U U^T 1 = 1 or ||U||^2 = K fails beyond tol.
ManifoldPoint factor_U(const Matrix& U, int K, double tol = 1e-8);

/// Retraction of the analytic point along scale * (unit random tangent),
/// halving scale until the assembled U is strictly positive.
ManifoldPoint perturbed_init(Eigen::Index n, Eigen::Index r, int K, double scale, std::uint64_t seed);

}  // namespace kmanifold
