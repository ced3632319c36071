#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmanifold/kmeans.hpp"

namespace kmanifold {

/// Exact-recovery separation threshold
///   Theta^2 = 4 sigma^2 (1 + sqrt(1 + K d / (n log n))) log n.
double separation_threshold(Eigen::Index n, Eigen::Index d, int K, double sigma);

struct GmmSpec {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  int K = 0;
  double sigma = 1.0;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  /// 1: centroid distance gamma * Theta; 2: gamma * Theta^2.
  int separation_power = 1;
  /// Optional cluster weights (normalized internally); balanced when empty.
  std::vector<double> proportions;

  void validate() const;
};

struct Dataset {
  Matrix X;
  std::optional<ClusterLabels> labels;
  std::string provenance;
  Matrix centroids;  ///< K x d, empty unless generated
  double threshold = 0.0;
  double separation = 0.0;  ///< target pairwise centroid distance
};

/// K x (K-1) vertices of a regular simplex centered at the origin with unit
/// pairwise distance.
Matrix regular_simplex(int K);

/// Cluster sizes: contiguous blocks, remainder to the first clusters (or
/// largest-remainder rounding of the proportions).
std::vector<Eigen::Index> cluster_sizes(Eigen::Index n, int K, const std::vector<double>& proportions = {});

/// Isotropic Gaussian mixture with simplex centroids in the first K-1
/// coordinates. Throws DimensionTooSmall if d < K-1.
Dataset generate_gmm(const GmmSpec& spec);

}  // namespace kmanifold
