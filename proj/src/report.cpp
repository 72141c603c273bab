#include "an2c/report.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace an2c {

namespace {

nlohmann::json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

template <typename T>
nlohmann::json optional_real(const std::optional<T>& v) {
  return v ? real(*v) : nlohmann::json(nullptr);
}

nlohmann::json counters_json(const EvalCounters& c) {
  return {{"f_evals", c.f_evals},
          {"g_evals", c.g_evals},
          {"H_evals", c.H_evals},
          {"factorizations", c.factorizations},
          {"eigen_solves", c.eigen_solves}};
}

nlohmann::json trace_json(const IterationTrace& t) {
  nlohmann::json j{{"k", t.k},
                   {"f", real(t.f)},
                   {"grad_norm", real(t.grad_norm)},
                   {"sigma", real(t.sigma)},
                   {"rho", real(t.rho)},
                   {"step_tag", to_string(t.step_tag)},
                   {"step_norm", real(t.step_norm)},
                   {"success", t.success},
                   {"eigen_solve_used", t.eigen_solve_used},
                   {"model_decrease", real(t.model_decrease)},
                   {"lambda_min", optional_real(t.lambda_min)}};
  if (t.conv_rejected) j["conv_rejected"] = to_string(*t.conv_rejected);
  if (t.subproblem_gradient) j["subproblem_gradient"] = real(*t.subproblem_gradient);
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

nlohmann::json config_json(const SolverConfig& cfg) {
  return {{"algo", to_string(cfg.mode)},
          {"eps1", cfg.eps1},
          {"eps2", cfg.eps2},
          {"sigma0", cfg.sigma0},
          {"sigma_min", cfg.sigma_min},
          {"kappa_a", cfg.kappa_a},
          {"kappa_c", cfg.kappa_C},
          {"kappa_theta", cfg.kappa_theta},
          {"varsigma1", cfg.varsigma1},
          {"varsigma2", cfg.varsigma2},
          {"varsigma3", cfg.varsigma3},
          {"gamma1", cfg.gamma1},
          {"gamma2", cfg.gamma2},
          {"gamma3", cfg.gamma3},
          {"eta1", cfg.eta1},
          {"eta2", cfg.eta2},
          {"max_iter", cfg.max_iter},
          {"theta_sub", optional_real(cfg.theta_sub)},
          {"backend", cfg.backend == LinearBackend::direct ? "direct" : "cg"},
          {"eig_tol", cfg.eig_tol},
          {"trace", to_string(cfg.trace)}};
}

nlohmann::json run_json(const RunRecord& run) {
  nlohmann::json steps = nlohmann::json::object();
  for (StepTag tag : {StepTag::conv, StepTag::neig, StepTag::curv, StepTag::so, StepTag::ar2})
    if (auto count = run.step_counts[static_cast<std::size_t>(tag)]) steps[std::string(to_string(tag))] = count;

  nlohmann::json x = nlohmann::json::array();
  for (double v : run.x_final) x.push_back(real(v));
  nlohmann::json trace = nlohmann::json::array();
  for (const IterationTrace& t : run.trace) trace.push_back(trace_json(t));

  nlohmann::json j{{"problem", run.problem},
                   {"n", run.n},
                   {"algo", to_string(run.mode)},
                   {"status", to_string(run.status)},
                   {"f_final", real(run.f_final)},
                   {"grad_norm_final", real(run.grad_norm_final)},
                   {"lambda_min_final", optional_real(run.lambda_min_final)},
                   {"sigma_final", real(run.sigma_final)},
                   {"sigma_max", real(run.sigma_max)},
                   {"iterations", run.iterations},
                   {"successful_iterations", run.successful_iterations},
                   {"step_counts", steps},
                   {"counters", counters_json(run.counters)},
                   {"x_final", x},
                   {"trace", trace}};
  if (!run.failure_reason.empty()) j["failure_reason"] = run.failure_reason;
  if (!run.invariant_violations.empty()) j["invariant_violations"] = run.invariant_violations;
  return j;
}

nlohmann::json run_json(const RunRecord& run, const SolverConfig& cfg) {
  nlohmann::json j = run_json(run);
  j["config"] = config_json(cfg);
  return j;
}

}  // namespace an2c
