#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kmanifold/solver.hpp"

namespace kmanifold {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

struct GenerateOptions {
  long n = 0;
  long d = 0;
  int k = 0;
  double gamma = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  int separation_power = 1;
  std::vector<double> proportions;
  std::string out;
  std::string labels_out;
};

struct ClusterOptions {
  std::string data;
  bool header = false;
  int k = 0;
  int r = 0;  ///< 0 means k + 1
  double mu = 0.01;
  std::string mode = "adaptive-lambda";
  double lambda0 = 1.0;
  double kappa_plus = 1.3;
  double kappa_minus = 1.1;
  double cubic_L = 10.0;
  int max_outer = 1000;
  int max_inner = 50;
  double grad_tol = 1e-8;
  double loss_tol = 1e-12;
  double init_scale = 0.5;
  int num_starts = 1;
  std::uint64_t seed = 0;
  bool min_eigenvalue = false;
  std::string out;
  std::string trace;
  std::string truth;
  std::string labels_out;
};

struct EvalOptions {
  std::string pred;
  std::string truth;
  int k = 0;
};

struct BenchOptions {
  std::vector<long> sizes;
  int repeats = 1;
  int k = 4;
  long d = 8;
  int r = 0;
  double gamma = 1.2;
  double sigma = 1.0;
  double mu = 0.01;
  int iterations = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchRow {
  long n = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double seconds_per_iteration = 0.0;
  int iterations = 0;
};

SolverConfig solver_config(const ClusterOptions& options);

int cmd_generate(const GenerateOptions& options, std::ostream& out);
int cmd_cluster(const ClusterOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out);
int cmd_bench(const BenchOptions& options, std::ostream& out);

/// Fixed-budget timing runs behind cmd_bench.
std::vector<BenchRow> run_bench(const BenchOptions& options);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Full command line (argv[0] is the program name). Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kmanifold
