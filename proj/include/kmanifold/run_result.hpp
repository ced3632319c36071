#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmanifold/kmeans.hpp"

namespace kmanifold {

inline constexpr const char* kRunResultSchema = "kmanifold/run-result/v1";

struct RunConfigEcho {
  std::string data;
  int K = 0;
  int r = 0;
  double mu = 0.0;
  std::string mode;
  double lambda0 = 0.0;
  double kappa_plus = 0.0;
  double kappa_minus = 0.0;
  double cubic_L = 0.0;
  int max_outer = 0;
  int max_inner = 0;
  double grad_tol = 0.0;
  double loss_tol = 0.0;
  int num_starts = 0;
  unsigned long long seed = 0;
};

struct RunMetrics {
  double misclustering_error = 0.0;
  double membership_gap = 0.0;
};

struct RunError {
  std::string kind;
  std::string message;
};

struct RunResult {
  std::string schema = kRunResultSchema;
  RunConfigEcho config;
  ClusterLabels labels;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  std::string termination;
  std::optional<double> min_hessian_eigenvalue;
  std::optional<RunMetrics> metrics;
  std::optional<RunError> error;
};

/// Single-line JSON document.
std::string serialize(const RunResult& result);
/// Throws ParseError on malformed input or a different schema.
RunResult parse_run_result(const std::string& text);

}  // namespace kmanifold
