#include "kmanifold/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kmanifold/errors.hpp"

namespace kmanifold {

namespace {

int infer_k(const ClusterLabels& a, const ClusterLabels& b) {
  int top = -1;
  for (int l : a) top = std::max(top, l);
  for (int l : b) top = std::max(top, l);
  return top + 1;
}

// Minimum-cost assignment on a square cost matrix (potentials method).
std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), way_min(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::fill(way_min.begin(), way_min.end(), inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const int row0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost(row0 - 1, col - 1) - u[row0] - v[col];
        if (cur < way_min[col]) {
          way_min[col] = cur;
          way[col] = col0;
        }
        if (way_min[col] < delta) {
          delta = way_min[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          way_min[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0);
  }
  std::vector<int> perm(n);
  for (int col = 1; col <= n; ++col) perm[match[col] - 1] = col - 1;
  return perm;
}

}  // namespace

Eigen::MatrixXi confusion_matrix(const ClusterLabels& pred, const ClusterLabels& truth, int K) {
  if (pred.size() != truth.size())
    throw LabelRangeMismatch("label vectors differ in length (" + std::to_string(pred.size()) + " vs " +
                             std::to_string(truth.size()) + ")");
  if (K <= 0) K = infer_k(pred, truth);
  Eigen::MatrixXi C = Eigen::MatrixXi::Zero(K, K);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= K || truth[i] < 0 || truth[i] >= K)
      throw LabelRangeMismatch("label out of range [0, " + std::to_string(K) + ") at index " + std::to_string(i));
    ++C(pred[i], truth[i]);
  }
  return C;
}

std::vector<int> best_assignment(const Eigen::MatrixXi& counts) {
  const int K = static_cast<int>(counts.rows());
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  if (K > 8) return hungarian(-counts.cast<double>());
  std::vector<int> best = perm;
  long best_score = -1;
  do {
    long score = 0;
    for (int a = 0; a < K; ++a) score += counts(a, perm[a]);
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double misclustering_error(const ClusterLabels& pred, const ClusterLabels& truth, int K) {
  const Eigen::MatrixXi C = confusion_matrix(pred, truth, K);
  if (pred.empty()) return 0.0;
  const std::vector<int> perm = best_assignment(C);
  long matched = 0;
  for (int a = 0; a < C.rows(); ++a) matched += C(a, perm[a]);
  return 1.0 - static_cast<double>(matched) / static_cast<double>(pred.size());
}

double membership_gap(const Matrix& U, const ClusterLabels& truth) {
  if (static_cast<Eigen::Index>(truth.size()) != U.rows())
    throw LabelRangeMismatch("truth length does not match the rows of U");
  const int K = infer_k(truth, {});
  Matrix sums = Matrix::Zero(K, U.cols());
  std::vector<double> sizes(K, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0) throw LabelRangeMismatch("negative label");
    sums.row(truth[i]) += U.row(static_cast<Eigen::Index>(i));
    sizes[truth[i]] += 1.0;
  }
  const Matrix gram = U.transpose() * U;
  double cross = 0.0;
  double groups = 0.0;
  for (int k = 0; k < K; ++k) {
    if (sizes[k] == 0.0) continue;
    cross += sums.row(k).squaredNorm() / sizes[k];
    groups += 1.0;
  }
  return std::sqrt(std::max(0.0, gram.squaredNorm() - 2.0 * cross + groups));
}

Matrix oracle_membership(const ClusterLabels& truth) {
  const Eigen::Index n = static_cast<Eigen::Index>(truth.size());
  std::vector<double> sizes(infer_k(truth, {}), 0.0);
  for (int l : truth) sizes[l] += 1.0;
  Matrix Z = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (truth[i] == truth[j]) Z(i, j) = 1.0 / sizes[truth[i]];
  return Z;
}

}  // namespace kmanifold
