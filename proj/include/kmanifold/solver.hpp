#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmanifold/objective.hpp"

namespace kmanifold {

enum class SolverMode { adaptive_lambda, cubic_bisection };
enum class Termination { grad_tol, loss_tol, max_outer, stagnation };

const char* to_string(SolverMode mode);
const char* to_string(Termination reason);
SolverMode parse_solver_mode(const std::string& text);

/// Outer-loop settings. The barrier weight mu and the rank r belong to the
/// Problem.
struct SolverConfig {
  SolverMode mode = SolverMode::adaptive_lambda;
  double lambda0 = 1.0;
  double kappa_plus = 1.3;
  double kappa_minus = 1.1;
  double cubic_L = 10.0;
  int max_outer = 1000;
  int max_inner = 50;
  double grad_tol = 1e-8;
  /// Stop when the relative loss change stays below this for loss_window
  /// consecutive accepted steps.
  double loss_tol = 1e-12;
  int loss_window = 3;
  double lambda_floor = 1e-12;
  /// Regularization above which an exhausted inner loop ends the run.
  double lambda_ceiling = 1e12;
  bool compute_min_eigenvalue = false;
  /// Step of the random tangent used by solve_multi_start.
  double init_scale = 0.5;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double loss = 0.0;
  /// Decrease certified by the acceptance test (0 unless accepted). The
  /// rounded loss column cannot resolve the last steps near convergence.
  double loss_decrease = 0.0;
  double grad_norm = 0.0;
  double lambda = 0.0;  ///< shift of the last attempt (cubic mode: lambda*; adaptive: the multiplier)
  double step_norm = 0.0;
  int inner_attempts = 0;
  double seconds = 0.0;  ///< cumulative wall clock
  double feasibility = 0.0;
  bool accepted = true;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::optional<double> min_hessian_eigenvalue;
};

struct SolveOutcome {
  ManifoldPoint point;
  Matrix U;
  IterationTrace trace;
  Termination reason = Termination::max_outer;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;  ///< accepted outer iterations
  double seconds = 0.0;
};

/// Riemannian second-order method. Each outer iteration builds the
/// gradient and Hessian blocks once, then tries up to max_inner shifts:
/// accept on strict loss decrease, otherwise enlarge the shift. Throws
/// InvalidInit for a non-interior start and NoProgress when the shift
/// passes lambda_ceiling before any step was accepted.
SolveOutcome solve(const Problem& problem, const ManifoldPoint& init, const SolverConfig& config);

struct StartSummary {
  std::uint64_t seed = 0;
  bool ok = false;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination reason = Termination::max_outer;
  std::string error_kind;
  std::string error_message;
};

struct MultiStartOutcome {
  SolveOutcome best;
  std::size_t best_index = 0;
  std::vector<StartSummary> starts;
};

/// Seed of start k, shared by solve_multi_start and its callers.
std::uint64_t start_seed(std::uint64_t seed, std::size_t k);

/// Worker count: min(requested or hardware, KMEANS_MANIFOLD_THREADS, jobs).
unsigned worker_threads(std::size_t jobs, unsigned requested = 0);

/// Runs solve from num_starts perturbed analytic starts, possibly in
/// parallel, and keeps the lowest final loss (ties broken by start index).
/// Rethrows the first start's error only if every start failed.
MultiStartOutcome solve_multi_start(const Problem& problem, const SolverConfig& config, int num_starts,
                                    unsigned threads = 0);

}  // namespace kmanifold
