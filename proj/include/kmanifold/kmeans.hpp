#pragma once

#include <cstdint>
#include <vector>

#include "kmanifold/manifold.hpp"

namespace kmanifold {

/// Cluster index per sample, each in [0, K).
using ClusterLabels = std::vector<int>;

struct KMeansOptions {
  int restarts = 10;
  int max_sweeps = 300;
  double tol = 1e-9;  ///< stop when no centroid moves farther than this
  std::uint64_t seed = 0;
};

struct KMeansResult {
  ClusterLabels labels;
  Matrix centroids;  ///< K x dim
  double inertia = 0.0;
  int sweeps = 0;
  std::vector<double> inertia_history;  ///< after each Lloyd sweep of the kept restart
};

/// k-means++ seeding followed by Lloyd iterations, best inertia over the
/// restarts that end with K nonempty clusters. Rows of `points` are the
/// samples. Throws DegenerateClustering when no restart has K nonempty
/// clusters.
KMeansResult kmeans(const Matrix& points, int K, const KMeansOptions& options = {});

/// Labels from the rows of a (near) membership factor U.
ClusterLabels recover_labels(const Matrix& U, int K, std::uint64_t seed = 0);

/// Plain k-means++ on the data, for comparison.
ClusterLabels kmeans_baseline(const Matrix& X, int K, std::uint64_t seed = 0);

}  // namespace kmanifold
