#include "kmanifold/kmeans.hpp"

#include <limits>
#include <optional>

#include "kmanifold/errors.hpp"
#include "kmanifold/random.hpp"

namespace kmanifold {

namespace {

Matrix seed_plus_plus(const Matrix& X, int K, Rng& rng) {
  const Eigen::Index n = X.rows();
  Matrix C(K, X.cols());
  C.row(0) = X.row(static_cast<Eigen::Index>(rng.below(n)));
  Vector dist = (X.rowwise() - C.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < K; ++k) {
    const double total = dist.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist(i);
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(n));
    }
    C.row(k) = X.row(pick);
    dist = dist.cwiseMin((X.rowwise() - C.row(k)).rowwise().squaredNorm());
  }
  return C;
}

// Assigns each row to its nearest centroid; returns the inertia.
double assign(const Matrix& X, const Matrix& C, ClusterLabels& labels) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index best = 0;
    const double d = (C.rowwise() - X.row(i)).rowwise().squaredNorm().minCoeff(&best);
    labels[i] = static_cast<int>(best);
    inertia += d;
  }
  return inertia;
}

KMeansResult lloyd(const Matrix& X, Matrix C, const KMeansOptions& options) {
  const int K = static_cast<int>(C.rows());
  KMeansResult res;
  res.labels.assign(X.rows(), 0);
  res.inertia = assign(X, C, res.labels);
  for (res.sweeps = 0; res.sweeps < options.max_sweeps;) {
    Matrix next = Matrix::Zero(K, X.cols());
    std::vector<Eigen::Index> counts(K, 0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      next.row(res.labels[i]) += X.row(i);
      ++counts[res.labels[i]];
    }
    for (int k = 0; k < K; ++k) next.row(k) = counts[k] ? Vector(next.row(k) / counts[k]) : Vector(C.row(k));
    const double moved = (next - C).rowwise().norm().maxCoeff();
    C = std::move(next);
    res.inertia = assign(X, C, res.labels);
    res.inertia_history.push_back(res.inertia);
    ++res.sweeps;
    if (moved <= options.tol) break;
  }
  res.centroids = std::move(C);
  return res;
}

bool all_nonempty(const ClusterLabels& labels, int K) {
  std::vector<bool> seen(K, false);
  for (int l : labels) seen[l] = true;
  for (bool s : seen)
    if (!s) return false;
  return true;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int K, const KMeansOptions& options) {
  if (K < 1) throw InvalidArgument("K must be positive");
  if (points.rows() < K) throw InvalidArgument("need at least K samples");
  if (!points.allFinite()) throw InvalidArgument("points must be finite");
  std::optional<KMeansResult> best;
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(restart)));
    KMeansResult res = lloyd(points, seed_plus_plus(points, K, rng), options);
    if (!all_nonempty(res.labels, K)) continue;
    if (!best || res.inertia < best->inertia) best = std::move(res);
  }
  if (!best) throw DegenerateClustering("every k-means restart left an empty cluster");
  return std::move(*best);
}

ClusterLabels recover_labels(const Matrix& U, int K, std::uint64_t seed) {
  KMeansOptions options;
  options.seed = seed;
  return kmeans(U, K, options).labels;
}

ClusterLabels kmeans_baseline(const Matrix& X, int K, std::uint64_t seed) {
  KMeansOptions options;
  options.seed = seed;
  return kmeans(X, K, options).labels;
}

}  // namespace kmanifold
