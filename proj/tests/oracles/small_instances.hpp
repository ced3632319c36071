#pragma once

#include <vector>

#include "instances.hpp"
#include "kmanifold/errors.hpp"

namespace oracle {

struct Shape {
  Eigen::Index n;
  int r, K;
};

/// Shapes with n <= 10 that admit an analytic interior point.
inline const std::vector<Shape>& small_shapes() {
  static const std::vector<Shape> shapes = [] {
    std::vector<Shape> out;
    for (int r = 3; r <= 5; ++r)
      for (int K = 2; K < r; ++K)
        for (Eigen::Index n = r; n <= 10; ++n) {
          try {
            kmanifold::interior_spec(n, r, K);
            out.push_back({n, r, K});
          } catch (const kmanifold::CoefficientNegative&) {
          }
        }
    return out;
  }();
  return shapes;
}

/// Instance number `seed` cycling through small_shapes().
inline Instance small_instance(std::uint64_t seed) {
  const Shape& s = small_shapes()[(seed * 7) % small_shapes().size()];
  const Eigen::Index d = 1 + static_cast<Eigen::Index>(seed % 3);
  return random_instance(s.n, d, s.K, s.r, 0.05 + 0.1 * (seed % 4), seed);
}

}  // namespace oracle
