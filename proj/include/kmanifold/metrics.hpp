#pragma once

#include "kmanifold/kmeans.hpp"

namespace kmanifold {

/// K x K counts, entry (a, b) = #{i : pred_i = a, truth_i = b}. K is
/// inferred as 1 + the largest label when not given. Throws
/// LabelRangeMismatch on unequal lengths or out-of-range labels.
Eigen::MatrixXi confusion_matrix(const ClusterLabels& pred, const ClusterLabels& truth, int K = 0);

/// Fraction of samples mislabeled under the best relabeling of pred.
double misclustering_error(const ClusterLabels& pred, const ClusterLabels& truth, int K = 0);

/// Permutation maximizing the matched counts of a square matrix
/// (perm[a] = column assigned to row a). Exhaustive for K <= 8, Hungarian
/// otherwise.
std::vector<int> best_assignment(const Eigen::MatrixXi& counts);

/// ||U U^T - Z*||_F with Z*_ij = 1/|G_k| for i, j in the same group,
/// evaluated in O(n r) through trace identities.
double membership_gap(const Matrix& U, const ClusterLabels& truth);

/// Dense Z* (diagnostics; small n).
Matrix oracle_membership(const ClusterLabels& truth);

}  // namespace kmanifold
