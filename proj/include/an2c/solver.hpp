#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "an2c/config.hpp"
#include "an2c/problems.hpp"
#include "an2c/steps.hpp"

namespace an2c {

struct IterationTrace {
  std::int64_t k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  StepTag step_tag = StepTag::conv;
  double step_norm = 0.0;
  bool success = false;
  bool eigen_solve_used = false;
  double model_decrease = 0.0;
  std::optional<double> lambda_min;          // when an eigenvalue was available at x_k
  std::optional<RejectReason> conv_rejected;  // why the convex step was not used
  std::optional<double> subproblem_gradient;  // AR2: ||grad m(s)|| at exit
};

enum class RunStatus { first_order, second_order, max_iter, numeric_failure };
std::string_view to_string(RunStatus status);

struct RunRecord {
  std::string problem;
  Eigen::Index n = 0;
  Mode mode = Mode::an2c;
  RunStatus status = RunStatus::max_iter;
  Vector x_final;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  std::optional<double> lambda_min_final;
  double sigma_final = 0.0;
  std::int64_t iterations = 0;
  std::int64_t successful_iterations = 0;
  double sigma_max = 0.0;  // over sigma_0 .. sigma_{k-1}
  std::array<std::int64_t, 5> step_counts{};  // indexed by StepTag, successful or not
  EvalCounters counters;
  std::vector<IterationTrace> trace;  // full, last 10 (summary) or empty (none)
  std::string failure_reason;
  std::vector<std::string> invariant_violations;
};

/// Everything known about one iteration, handed to an observer before the
/// iterate is updated. References are valid only during the call.
struct IterationView {
  const IterationTrace& record;
  const Vector& x;
  const Vector& g;
  const SymmetricMatrix& H;
  const StepOutcome& step;
  double f_trial;
};

using IterationObserver = std::function<void(const IterationView&)>;

/// rho = (f_x - f_trial) / (-(g's + s'Hs/2)); -inf when f_trial is not
/// finite or the model decrease is at most 1e-15 max(1, |f_x|).
double acceptance_ratio(double f_x, double f_trial, const Vector& g, const SymmetricMatrix& H, const Vector& s);

/// Same guard, for a precomputed model decrease.
double acceptance_ratio(double f_x, double f_trial, double model_decrease);

/// Endpoint policy: max(sigma_min, gamma1 sigma) on very successful
/// iterations, unchanged on successful ones, gamma2 sigma otherwise.
double update_sigma(double sigma, double rho, const SolverConfig& cfg);

/// Runs the mode selected in cfg (AR2 delegates to solve_ar2).
RunRecord solve(const Problem& problem, const SolverConfig& cfg, const IterationObserver& observer = {});

/// Adaptive cubic regularization with a Lanczos subproblem solver.
RunRecord solve_ar2(const Problem& problem, const SolverConfig& cfg, const IterationObserver& observer = {});

/// Bound on the total iteration count from the success count and the
/// largest sigma seen: |S|(1 + |log g1|/log g2) + log(sigma_max/sigma0)/log g2 + 1.
double iteration_bound(const RunRecord& run, const SolverConfig& cfg);

}  // namespace an2c
