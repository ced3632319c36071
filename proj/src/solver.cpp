#include "kmanifold/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "kmanifold/errors.hpp"
#include "kmanifold/initialization.hpp"
#include "kmanifold/random.hpp"
#include "kmanifold/subproblem.hpp"

namespace kmanifold {

const char* to_string(SolverMode mode) {
  return mode == SolverMode::adaptive_lambda ? "adaptive-lambda" : "cubic-bisection";
}

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::grad_tol: return "grad_tol";
    case Termination::loss_tol: return "loss_tol";
    case Termination::max_outer: return "max_outer";
    case Termination::stagnation: return "stagnation";
  }
  return "unknown";
}

SolverMode parse_solver_mode(const std::string& text) {
  if (text == "adaptive-lambda" || text == "adaptive") return SolverMode::adaptive_lambda;
  if (text == "cubic-bisection" || text == "cubic") return SolverMode::cubic_bisection;
  throw InvalidArgument("unknown solver mode '" + text + "'");
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw InvalidArgument(msg);
  };
  require(kappa_plus > 1.0, "kappa_plus must exceed 1");
  require(kappa_minus > 1.0, "kappa_minus must exceed 1");
  require(lambda0 > 0.0 && std::isfinite(lambda0), "lambda0 must be positive");
  require(cubic_L > 0.0 && std::isfinite(cubic_L), "cubic L must be positive");
  require(grad_tol > 0.0 && loss_tol > 0.0, "tolerances must be positive");
  require(max_outer >= 0 && max_inner >= 1 && loss_window >= 1, "iteration limits must be positive");
  require(lambda_floor > 0.0 && lambda_ceiling > lambda_floor, "need 0 < lambda_floor < lambda_ceiling");
  require(init_scale >= 0.0, "init_scale must be non-negative");
}

SolveOutcome solve(const Problem& problem, const ManifoldPoint& init, const SolverConfig& config) {
  config.validate();
  if (init.n() != problem.n() || init.r() != problem.r() || init.K() != problem.K())
    throw InvalidArgument("initial point does not match the problem dimensions");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  ManifoldPoint point = init;
  PointEvaluation eval;
  try {
    eval = evaluate(problem, point);
  } catch (const NonInteriorPoint& e) {
    throw InvalidInit(std::string("initial point is not strictly interior: ") + e.what());
  }
  double current = eval.loss;
  double grad_norm = eval.gradient.norm();

  const bool adaptive = config.mode == SolverMode::adaptive_lambda;
  double lambda = config.lambda0;
  double L = config.cubic_L;
  const double L_floor = 1e-12 * config.cubic_L;

  SolveOutcome out{point, eval.U, {}, Termination::max_outer, eval.loss, grad_norm, 0, 0.0};
  out.trace.records.push_back(
      {0, eval.loss, 0.0, grad_norm, lambda, 0.0, 0, elapsed(), check_feasibility(point).max_residual(), true});

  int accepted_steps = 0;
  int quiet_steps = 0;
  bool decided = false;
  for (int it = 1; it <= config.max_outer; ++it) {
    if (grad_norm <= config.grad_tol) {
      out.reason = Termination::grad_tol;
      decided = true;
      break;
    }
    const HessianBlocks blocks = hessian_blocks(problem, point, eval, 0.0);
    const Vector g = vectorize(eval.gradient);

    IterationRecord rec;
    rec.iter = it;
    rec.accepted = false;
    std::optional<ManifoldPoint> candidate;
    long double decrease = 0.0L;
    for (int attempt = 1; attempt <= config.max_inner; ++attempt) {
      rec.inner_attempts = attempt;
      long double change = std::numeric_limits<long double>::infinity();
      try {
        const StepSolution step = adaptive ? solve_saddle(blocks.shifted(lambda), g) : bisect_cubic_step(blocks, g, L);
        rec.step_norm = step.norm_p;
        rec.lambda = step.lambda;
        candidate.emplace(retract(point, step.p));
        change = loss_change(problem, point, *candidate, eval.multipliers);
      } catch (const SingularSystem&) {
      } catch (const DegenerateRetraction&) {
      } catch (const BracketingFailure&) {
      }
      if (change < 0.0L) {
        decrease = -change;
        rec.accepted = true;
        if (adaptive) lambda = std::max(lambda / config.kappa_minus, config.lambda_floor);
        else L = std::max(L / config.kappa_minus, L_floor);
        break;
      }
      if (adaptive) lambda *= config.kappa_plus;
      else L *= config.kappa_plus;
    }
    if (!adaptive && !rec.accepted) rec.lambda = L;
    if (adaptive && !rec.accepted) rec.lambda = lambda;

    if (!rec.accepted) {
      rec.loss = current;
      rec.grad_norm = grad_norm;
      rec.seconds = elapsed();
      rec.feasibility = check_feasibility(point).max_residual();
      out.trace.records.push_back(rec);
      const double shift = adaptive ? lambda : L;
      if (shift > config.lambda_ceiling) {
        if (accepted_steps == 0)
          throw NoProgress("no descent step found before the regularization exceeded " +
                           std::to_string(config.lambda_ceiling));
        out.reason = Termination::stagnation;
        decided = true;
        break;
      }
      continue;
    }

    point = std::move(*candidate);
    eval = evaluate(problem, point);
    current = eval.loss;
    grad_norm = eval.gradient.norm();
    ++accepted_steps;

    rec.loss = current;
    rec.loss_decrease = static_cast<double>(decrease);
    rec.grad_norm = grad_norm;
    rec.seconds = elapsed();
    rec.feasibility = check_feasibility(point).max_residual();
    out.trace.records.push_back(rec);

    const long double scale = std::max(1.0, std::abs(current));
    quiet_steps = (decrease / scale <= config.loss_tol) ? quiet_steps + 1 : 0;
    if (grad_norm <= config.grad_tol) {
      out.reason = Termination::grad_tol;
      decided = true;
      break;
    }
    if (quiet_steps >= config.loss_window) {
      out.reason = Termination::loss_tol;
      decided = true;
      break;
    }
  }
  if (!decided) out.reason = grad_norm <= config.grad_tol ? Termination::grad_tol : Termination::max_outer;

  out.U = eval.U;
  out.loss = current;
  out.grad_norm = grad_norm;
  out.iterations = accepted_steps;
  if (config.compute_min_eigenvalue) out.trace.min_hessian_eigenvalue = min_hessian_eigenvalue(problem, point);
  out.seconds = elapsed();
  out.point = std::move(point);
  return out;
}

std::uint64_t start_seed(std::uint64_t seed, std::size_t k) { return mix_seed(seed, k); }

unsigned worker_threads(std::size_t jobs, unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KMEANS_MANIFOLD_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

MultiStartOutcome solve_multi_start(const Problem& problem, const SolverConfig& config, int num_starts,
                                    unsigned threads) {
  if (num_starts < 1) throw InvalidArgument("num_starts must be at least 1");
  config.validate();
  const std::size_t jobs = static_cast<std::size_t>(num_starts);
  std::vector<std::optional<SolveOutcome>> outcomes(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<StartSummary> summaries(jobs);

  auto run = [&](std::size_t k) {
    StartSummary& s = summaries[k];
    s.seed = start_seed(config.seed, k);
    try {
      const ManifoldPoint init = perturbed_init(problem.n(), problem.r(), problem.K(), config.init_scale, s.seed);
      outcomes[k] = solve(problem, init, config);
      s.ok = true;
      s.loss = outcomes[k]->loss;
      s.grad_norm = outcomes[k]->grad_norm;
      s.iterations = outcomes[k]->iterations;
      s.reason = outcomes[k]->reason;
    } catch (const Error& e) {
      errors[k] = std::current_exception();
      s.error_kind = e.kind();
      s.error_message = e.what();
    } catch (const std::exception& e) {
      errors[k] = std::current_exception();
      s.error_kind = "InternalError";
      s.error_message = e.what();
    }
  };

  const unsigned workers = worker_threads(jobs, threads);
  if (workers <= 1) {
    for (std::size_t k = 0; k < jobs; ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < jobs;) run(k);
      });
    for (auto& th : pool) th.join();
  }

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < jobs; ++k)
    if (outcomes[k] && (!best || outcomes[k]->loss < outcomes[*best]->loss)) best = k;
  if (!best) std::rethrow_exception(errors.front());

  return {std::move(*outcomes[*best]), *best, std::move(summaries)};
}

}  // namespace kmanifold
