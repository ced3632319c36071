#include "kmanifold/run_result.hpp"

#include <json.hpp>

#include "kmanifold/errors.hpp"

namespace kmanifold {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunConfigEcho, data, K, r, mu, mode, lambda0, kappa_plus, kappa_minus, cubic_L,
                                   max_outer, max_inner, grad_tol, loss_tol, num_starts, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunMetrics, misclustering_error, membership_gap)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunError, kind, message)

namespace {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string serialize(const RunResult& r) {
  json j;
  j["schema"] = r.schema;
  j["config"] = r.config;
  j["labels"] = r.labels;
  j["final_loss"] = r.final_loss;
  j["final_grad_norm"] = r.final_grad_norm;
  j["iterations"] = r.iterations;
  j["wall_seconds"] = r.wall_seconds;
  j["termination"] = r.termination;
  j["min_hessian_eigenvalue"] = optional_json(r.min_hessian_eigenvalue);
  j["metrics"] = optional_json(r.metrics);
  j["error"] = optional_json(r.error);
  return j.dump();
}

RunResult parse_run_result(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunResult r;
    r.schema = j.at("schema").get<std::string>();
    if (r.schema != kRunResultSchema) throw ParseError("unsupported result schema '" + r.schema + "'");
    r.config = j.at("config").get<RunConfigEcho>();
    r.labels = j.at("labels").get<ClusterLabels>();
    r.final_loss = j.at("final_loss").get<double>();
    r.final_grad_norm = j.at("final_grad_norm").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.termination = j.at("termination").get<std::string>();
    r.min_hessian_eigenvalue = optional_from<double>(j, "min_hessian_eigenvalue");
    r.metrics = optional_from<RunMetrics>(j, "metrics");
    r.error = optional_from<RunError>(j, "error");
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed run result: ") + e.what());
  }
}

}  // namespace kmanifold
