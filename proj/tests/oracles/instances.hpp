#pragma once

#include <cstdint>

#include "kmanifold/initialization.hpp"
#include "kmanifold/objective.hpp"
#include "kmanifold/random.hpp"

namespace oracle {

using kmanifold::Matrix;
using kmanifold::Vector;

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  kmanifold::Rng rng(seed);
  Matrix A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = rng.normal();
  return A;
}

struct Instance {
  kmanifold::Problem problem;
  kmanifold::ManifoldPoint point;
};

/// Random data and a random strictly interior point.
inline Instance random_instance(Eigen::Index n, Eigen::Index d, int K, int r, double mu, std::uint64_t seed,
                                double scale = 0.3) {
  kmanifold::Problem problem(gaussian_matrix(n, d, seed), K, r, mu);
  return {std::move(problem), kmanifold::perturbed_init(n, r, K, scale, seed ^ 0x5eedULL)};
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

}  // namespace oracle
