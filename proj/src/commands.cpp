#include "kmanifold/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>

#include "kmanifold/csv_io.hpp"
#include "kmanifold/datagen.hpp"
#include "kmanifold/errors.hpp"
#include "kmanifold/initialization.hpp"
#include "kmanifold/metrics.hpp"
#include "kmanifold/random.hpp"
#include "kmanifold/run_result.hpp"

namespace kmanifold {

namespace {

bool is_solver_failure(const Error& e) {
  static const char* kinds[] = {"NoProgress",  "SingularSystem",       "BracketingFailure",
                                "InvalidInit", "DegenerateRetraction", "DegenerateClustering",
                                "NonInteriorPoint"};
  for (const char* k : kinds)
    if (e.kind() == k) return true;
  return false;
}

void write_trace(const IterationTrace& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << "iter,loss,grad_norm,lambda,step_norm,seconds,inner_attempts,accepted,loss_decrease,feasibility\n"
    << std::setprecision(17);
  for (const auto& r : trace.records)
    f << r.iter << ',' << r.loss << ',' << r.grad_norm << ',' << r.lambda << ',' << r.step_norm << ',' << r.seconds
      << ',' << r.inner_attempts << ',' << (r.accepted ? 1 : 0) << ',' << r.loss_decrease << ',' << r.feasibility
      << '\n';
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text << '\n';
}

}  // namespace

SolverConfig solver_config(const ClusterOptions& o) {
  SolverConfig c;
  c.mode = parse_solver_mode(o.mode);
  c.lambda0 = o.lambda0;
  c.kappa_plus = o.kappa_plus;
  c.kappa_minus = o.kappa_minus;
  c.cubic_L = o.cubic_L;
  c.max_outer = o.max_outer;
  c.max_inner = o.max_inner;
  c.grad_tol = o.grad_tol;
  c.loss_tol = o.loss_tol;
  c.init_scale = o.init_scale;
  c.seed = o.seed;
  c.compute_min_eigenvalue = o.min_eigenvalue;
  c.validate();
  return c;
}

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  if (o.out.empty()) throw InvalidArgument("--out is required");
  GmmSpec spec;
  spec.n = o.n;
  spec.d = o.d;
  spec.K = o.k;
  spec.sigma = o.sigma;
  spec.gamma = o.gamma;
  spec.seed = o.seed;
  spec.separation_power = o.separation_power;
  spec.proportions = o.proportions;
  const Dataset ds = generate_gmm(spec);
  write_csv(ds, o.out);
  if (!o.labels_out.empty()) write_labels(*ds.labels, o.labels_out);

  double realized = std::numeric_limits<double>::infinity();
  for (int a = 0; a < spec.K; ++a)
    for (int b = a + 1; b < spec.K; ++b)
      realized = std::min(realized, (ds.centroids.row(a) - ds.centroids.row(b)).norm());
  out << std::setprecision(10) << "threshold " << ds.threshold << "\nseparation " << realized << '\n';
  return kExitOk;
}

int cmd_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
  const SolverConfig config = solver_config(o);
  const int r = o.r > 0 ? o.r : o.k + 1;
  Dataset ds = read_csv(o.data, o.header);
  std::optional<ClusterLabels> truth;
  if (!o.truth.empty()) {
    truth = read_labels(o.truth);
    if (static_cast<Eigen::Index>(truth->size()) != ds.X.rows())
      throw LabelRangeMismatch("truth has " + std::to_string(truth->size()) + " labels for " +
                               std::to_string(ds.X.rows()) + " rows");
  }
  const Problem problem(std::move(ds.X), o.k, r, o.mu);

  RunResult result;
  result.config = {o.data,        o.k,         r,           o.mu,       std::string(to_string(config.mode)),
                   o.lambda0,     o.kappa_plus, o.kappa_minus, o.cubic_L, o.max_outer,
                   o.max_inner,   o.grad_tol,  o.loss_tol,  o.num_starts, o.seed};
  int code = kExitOk;
  try {
    MultiStartOutcome ms = solve_multi_start(problem, config, o.num_starts);
    const SolveOutcome& best = ms.best;
    result.labels = recover_labels(best.U, o.k, o.seed);
    result.final_loss = best.loss;
    result.final_grad_norm = best.grad_norm;
    result.iterations = best.iterations;
    result.wall_seconds = best.seconds;
    result.termination = to_string(best.reason);
    result.min_hessian_eigenvalue = best.trace.min_hessian_eigenvalue;
    if (truth) result.metrics = RunMetrics{misclustering_error(result.labels, *truth, o.k), membership_gap(best.U, *truth)};
    if (!o.trace.empty()) write_trace(best.trace, o.trace);
    if (!o.labels_out.empty()) write_labels(result.labels, o.labels_out);
  } catch (const Error& e) {
    if (!is_solver_failure(e)) throw;
    result.error = RunError{e.kind(), e.what()};
    result.termination = "error";
    err << "solver failed: " << e.kind() << ": " << e.what() << '\n';
    code = kExitSolver;
  }
  emit(serialize(result), o.out, out);
  return code;
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const ClusterLabels pred = read_labels(o.pred);
  const ClusterLabels truth = read_labels(o.truth);
  const Eigen::MatrixXi C = confusion_matrix(pred, truth, o.k);
  nlohmann::json j;
  j["misclustering_error"] = misclustering_error(pred, truth, o.k);
  j["n"] = pred.size();
  std::vector<std::vector<int>> rows(C.rows(), std::vector<int>(C.cols()));
  for (Eigen::Index a = 0; a < C.rows(); ++a)
    for (Eigen::Index b = 0; b < C.cols(); ++b) rows[a][b] = C(a, b);
  j["confusion"] = rows;
  out << j.dump() << '\n';
  return kExitOk;
}

std::vector<BenchRow> run_bench(const BenchOptions& o) {
  if (o.sizes.empty()) throw InvalidArgument("--sizes needs at least one value");
  if (o.repeats < 1 || o.iterations < 1) throw InvalidArgument("--repeats and --iters must be positive");
  const int r = o.r > 0 ? o.r : o.k + 1;
  SolverConfig config;
  config.max_outer = o.iterations;
  config.grad_tol = 1e-300;
  config.loss_tol = 1e-300;
  std::vector<BenchRow> rows;
  for (std::size_t s = 0; s < o.sizes.size(); ++s) {
    for (int rep = 0; rep < o.repeats; ++rep) {
      GmmSpec spec;
      spec.n = o.sizes[s];
      spec.d = o.d;
      spec.K = o.k;
      spec.sigma = o.sigma;
      spec.gamma = o.gamma;
      spec.seed = mix_seed(o.seed, s * 1000003ULL + static_cast<std::uint64_t>(rep));
      Dataset ds = generate_gmm(spec);
      const Problem problem(std::move(ds.X), o.k, r, o.mu);
      const SolveOutcome res = solve(problem, interior_point(spec.n, r, o.k), config);
      const int outer = static_cast<int>(res.trace.records.size()) - 1;
      rows.push_back({spec.n, rep, spec.seed, outer > 0 ? res.trace.records.back().seconds / outer : 0.0, outer});
    }
  }
  return rows;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  std::ostringstream csv;
  csv << "n,repeat,seed,seconds_per_iteration,iterations\n" << std::setprecision(10);
  for (const BenchRow& row : run_bench(o))
    csv << row.n << ',' << row.repeat << ',' << row.seed << ',' << row.seconds_per_iteration << ',' << row.iterations
        << '\n';
  std::string text = csv.str();
  text.pop_back();
  emit(text, o.out, out);
  return kExitOk;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs two or more paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"K-means clustering by Riemannian second-order optimization"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Sample a Gaussian mixture with simplex centroids");
  g->add_option("--n", gen.n, "Samples")->required()->check(CLI::PositiveNumber);
  g->add_option("--d", gen.d, "Dimension")->required()->check(CLI::PositiveNumber);
  g->add_option("--k", gen.k, "Clusters")->required()->check(CLI::Range(2, 1 << 20));
  g->add_option("--gamma", gen.gamma, "Separation multiplier")->check(CLI::PositiveNumber);
  g->add_option("--sigma", gen.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--separation-power", gen.separation_power, "Scale by Theta (1) or Theta^2 (2)")
      ->check(CLI::IsMember({1, 2}));
  g->add_option("--proportions", gen.proportions, "Cluster weights")->delimiter(',');
  g->add_option("--out", gen.out, "Data CSV")->required();
  g->add_option("--labels-out", gen.labels_out, "Label file");

  ClusterOptions cl;
  auto* c = app.add_subcommand("cluster", "Cluster a CSV dataset");
  c->add_option("--data", cl.data)->required();
  c->add_flag("--header", cl.header, "First CSV row is a header");
  c->add_option("--k", cl.k)->required()->check(CLI::Range(2, 1 << 20));
  c->add_option("--r", cl.r, "Search rank (default k+1)");
  c->add_option("--mu", cl.mu)->check(CLI::PositiveNumber);
  c->add_option("--mode", cl.mode)->check(CLI::IsMember({"adaptive-lambda", "cubic-bisection", "adaptive", "cubic"}));
  c->add_option("--lambda0", cl.lambda0);
  c->add_option("--kappa-plus", cl.kappa_plus);
  c->add_option("--kappa-minus", cl.kappa_minus);
  c->add_option("--cubic-L", cl.cubic_L);
  c->add_option("--max-outer", cl.max_outer);
  c->add_option("--max-inner", cl.max_inner);
  c->add_option("--grad-tol", cl.grad_tol);
  c->add_option("--loss-tol", cl.loss_tol);
  c->add_option("--init-scale", cl.init_scale);
  c->add_option("--num-starts", cl.num_starts)->check(CLI::PositiveNumber);
  c->add_option("--seed", cl.seed);
  c->add_flag("--min-eig", cl.min_eigenvalue, "Report the smallest projected Hessian eigenvalue");
  c->add_option("--out", cl.out, "Result JSON (default stdout)");
  c->add_option("--trace", cl.trace, "Per-iteration CSV");
  c->add_option("--truth", cl.truth, "Ground-truth labels");
  c->add_option("--labels-out", cl.labels_out);

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Compare two label files");
  e->add_option("--pred", ev.pred)->required();
  e->add_option("--truth", ev.truth)->required();
  e->add_option("--k", ev.k, "Number of clusters (default: inferred)");

  BenchOptions be;
  auto* b = app.add_subcommand("bench", "Per-iteration time against sample size");
  b->add_option("--sizes", be.sizes)->required()->delimiter(',');
  b->add_option("--repeats", be.repeats);
  b->add_option("--k", be.k);
  b->add_option("--d", be.d);
  b->add_option("--r", be.r);
  b->add_option("--gamma", be.gamma);
  b->add_option("--sigma", be.sigma);
  b->add_option("--mu", be.mu);
  b->add_option("--iters", be.iterations, "Outer iterations per run");
  b->add_option("--seed", be.seed);
  b->add_option("--out", be.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*c) return cmd_cluster(cl, out, err);
    if (*e) return cmd_eval(ev, out);
    return cmd_bench(be, out);
  } catch (const Error& ex) {
    err << "error: " << ex.kind() << ": " << ex.what() << '\n';
    return is_solver_failure(ex) ? kExitSolver : kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace kmanifold
