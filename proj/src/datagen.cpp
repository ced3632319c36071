#include "kmanifold/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kmanifold/errors.hpp"
#include "kmanifold/random.hpp"

namespace kmanifold {

double separation_threshold(Eigen::Index n, Eigen::Index d, int K, double sigma) {
  if (n < 2) throw InvalidArgument("separation threshold needs n >= 2");
  const double nd = static_cast<double>(n);
  const double logn = std::log(nd);
  const double inner = 1.0 + static_cast<double>(K) * static_cast<double>(d) / (nd * logn);
  return std::sqrt(4.0 * sigma * sigma * (1.0 + std::sqrt(inner)) * logn);
}

void GmmSpec::validate() const {
  if (K < 2) throw InvalidArgument("K must be at least 2");
  if (n < K) throw InvalidArgument("need n >= K");
  if (d < K - 1)
    throw DimensionTooSmall("d=" + std::to_string(d) + " cannot hold a simplex with K=" + std::to_string(K) +
                            " vertices (need d >= K-1)");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (separation_power != 1 && separation_power != 2) throw InvalidArgument("separation power must be 1 or 2");
  if (!proportions.empty()) {
    if (static_cast<int>(proportions.size()) != K) throw InvalidArgument("need one proportion per cluster");
    for (double p : proportions)
      if (!(p > 0.0)) throw InvalidArgument("proportions must be positive");
  }
}

Matrix regular_simplex(int K) {
  const Matrix centered = Matrix::Identity(K, K) - Matrix::Constant(K, K, 1.0 / K);
  Eigen::HouseholderQR<Matrix> qr(centered);
  const Matrix basis = (qr.householderQ() * Matrix::Identity(K, K)).leftCols(K - 1);
  return (centered * basis) / std::sqrt(2.0);
}

std::vector<Eigen::Index> cluster_sizes(Eigen::Index n, int K, const std::vector<double>& proportions) {
  std::vector<Eigen::Index> sizes(K);
  if (proportions.empty()) {
    for (int k = 0; k < K; ++k) sizes[k] = n / K + (k < n % K ? 1 : 0);
    return sizes;
  }
  const double total = std::accumulate(proportions.begin(), proportions.end(), 0.0);
  std::vector<double> frac(K);
  Eigen::Index assigned = 0;
  for (int k = 0; k < K; ++k) {
    const double exact = static_cast<double>(n) * proportions[k] / total;
    sizes[k] = static_cast<Eigen::Index>(std::floor(exact));
    frac[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  for (Eigen::Index extra = 0; assigned < n; ++extra, ++assigned) ++sizes[order[extra % K]];
  return sizes;
}

Dataset generate_gmm(const GmmSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.threshold = separation_threshold(spec.n, spec.d, spec.K, spec.sigma);
  ds.separation = spec.gamma * (spec.separation_power == 2 ? ds.threshold * ds.threshold : ds.threshold);
  ds.centroids = Matrix::Zero(spec.K, spec.d);
  ds.centroids.leftCols(spec.K - 1) = ds.separation * regular_simplex(spec.K);

  ClusterLabels labels;
  labels.reserve(spec.n);
  const auto sizes = cluster_sizes(spec.n, spec.K, spec.proportions);
  for (int k = 0; k < spec.K; ++k) labels.insert(labels.end(), sizes[k], k);

  Rng rng(spec.seed);
  ds.X.resize(spec.n, spec.d);
  for (Eigen::Index i = 0; i < spec.n; ++i)
    for (Eigen::Index j = 0; j < spec.d; ++j) ds.X(i, j) = ds.centroids(labels[i], j) + spec.sigma * rng.normal();
  ds.labels = std::move(labels);
  ds.provenance = "gmm n=" + std::to_string(spec.n) + " d=" + std::to_string(spec.d) + " K=" +
                  std::to_string(spec.K) + " seed=" + std::to_string(spec.seed);
  return ds;
}

}  // namespace kmanifold
