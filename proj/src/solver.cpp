#include "an2c/solver.hpp"

#include <cmath>
#include <limits>

#include "an2c/cubic.hpp"

namespace an2c {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::first_order: return "first_order";
    case RunStatus::second_order: return "second_order";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::numeric_failure: return "numeric_failure";
  }
  return "?";
}

double acceptance_ratio(double f_x, double f_trial, double decrease) {
  if (!std::isfinite(f_trial) || !(decrease > 1e-15 * std::max(1.0, std::abs(f_x))))
    return -std::numeric_limits<double>::infinity();
  return (f_x - f_trial) / decrease;
}

double acceptance_ratio(double f_x, double f_trial, const Vector& g, const SymmetricMatrix& H, const Vector& s) {
  return acceptance_ratio(f_x, f_trial, model_decrease(g, H, s));
}

double update_sigma(double sigma, double rho, const SolverConfig& cfg) {
  if (rho >= cfg.eta2) return std::max(cfg.sigma_min, cfg.gamma1 * sigma);
  if (rho >= cfg.eta1) return sigma;
  return cfg.gamma2 * sigma;
}

double iteration_bound(const RunRecord& run, const SolverConfig& cfg) {
  const double log_g2 = std::log(cfg.gamma2);
  const double successes = static_cast<double>(run.successful_iterations);
  const double growth = run.sigma_max > 0.0 ? std::log(run.sigma_max / cfg.sigma0) / log_g2 : 0.0;
  return successes * (1.0 + std::abs(std::log(cfg.gamma1)) / log_g2) + growth + 1.0;
}

namespace {

constexpr std::size_t kSummaryTail = 10;  // iterations kept by TraceLevel::summary

// Shared outer loop. `compute_step` returns the trial step for the current
// iterate; the loop owns evaluation, acceptance and the sigma update.
class OuterLoop {
 public:
  OuterLoop(const Problem& problem, const SolverConfig& cfg, const IterationObserver& observer)
      : problem_(problem), cfg_(cfg), observer_(observer) {
    run_.problem = problem.name;
    run_.n = problem.n;
    run_.mode = cfg.mode;
  }

  RunRecord& run() { return run_; }
  EvalCounters& counters() { return run_.counters; }
  std::optional<EigenPair>& eigen_at_x() { return eig_; }

  const EigenPair& ensure_eigen(const SymmetricMatrix& H) {
    if (!eig_) {
      eig_ = min_eigenpair(H, cfg_.eig_tol);
      ++run_.counters.eigen_solves;
    }
    return *eig_;
  }

  template <typename Terminate, typename Step>
  RunRecord execute(Terminate&& terminate, Step&& compute_step) {
    cfg_.validate();
    if (problem_.x0.size() != problem_.n) throw std::invalid_argument("start point has the wrong dimension");

    Vector x = problem_.x0;
    Evaluation at_x = evaluate(problem_, x, 2, run_.counters);
    if (!at_x.finite) return fail(x, at_x, "non-finite objective or derivatives at the starting point");
    double sigma = cfg_.sigma0;
    run_.sigma_max = sigma;

    for (std::int64_t k = 0;; ++k) {
      const double gnorm = at_x.g.norm();
      if (std::optional<RunStatus> done = terminate(gnorm, *at_x.H)) return finish(x, at_x, *done, sigma);
      if (k >= cfg_.max_iter) return finish(x, at_x, RunStatus::max_iter, sigma);

      IterationTrace record;
      record.k = k;
      record.f = at_x.f;
      record.grad_norm = gnorm;
      record.sigma = sigma;
      StepOutcome step;
      try {
        step = compute_step(at_x.g, *at_x.H, sigma, record);
      } catch (const std::exception& e) {
        return fail(x, at_x, e.what());
      }
      if (eig_) record.lambda_min = eig_->lambda_min;
      record.step_tag = step.tag;
      record.step_norm = step.s.norm();
      record.model_decrease = step.model_decrease;
      ++run_.step_counts[static_cast<std::size_t>(step.tag)];
      if (step.tag != StepTag::ar2)
        for (std::string& v : step_invariant_violations(step, at_x.g, *at_x.H, sigma, cfg_))
          run_.invariant_violations.push_back("k=" + std::to_string(k) + " " + v);

      Vector trial = x + step.s;
      const Evaluation at_trial = evaluate(problem_, trial, 0, run_.counters);
      record.rho = acceptance_ratio(at_x.f, at_trial.f, step.model_decrease);
      record.success = record.rho >= cfg_.eta1;
      if (observer_) observer_(IterationView{record, x, at_x.g, *at_x.H, step, at_trial.f});
      if (cfg_.trace != TraceLevel::none) {
        run_.trace.push_back(record);
        if (cfg_.trace == TraceLevel::summary && run_.trace.size() > kSummaryTail) run_.trace.erase(run_.trace.begin());
      }
      ++run_.iterations;

      sigma = update_sigma(sigma, record.rho, cfg_);
      if (record.success) {
        ++run_.successful_iterations;
        x = std::move(trial);
        at_x = evaluate(problem_, x, 2, run_.counters);
        eig_.reset();
        if (!at_x.finite) return fail(x, at_x, "non-finite derivatives at an accepted iterate");
      }
      if (k + 1 < cfg_.max_iter) run_.sigma_max = std::max(run_.sigma_max, sigma);
    }
  }

 private:
  RunRecord finish(const Vector& x, const Evaluation& at_x, RunStatus status, double sigma) {
    run_.status = status;
    run_.x_final = x;
    run_.f_final = at_x.f;
    run_.grad_norm_final = at_x.g.size() ? at_x.g.norm() : std::numeric_limits<double>::quiet_NaN();
    run_.sigma_final = sigma;
    if (eig_) run_.lambda_min_final = eig_->lambda_min;
    return std::move(run_);
  }

  RunRecord fail(const Vector& x, const Evaluation& at_x, std::string reason) {
    run_.failure_reason = std::move(reason);
    return finish(x, at_x, RunStatus::numeric_failure, run_.sigma_final);
  }

  const Problem& problem_;
  const SolverConfig& cfg_;
  const IterationObserver& observer_;
  RunRecord run_;
  std::optional<EigenPair> eig_;
};

}  // namespace

RunRecord solve(const Problem& problem, const SolverConfig& cfg, const IterationObserver& observer) {
  if (cfg.mode == Mode::ar2) return solve_ar2(problem, cfg, observer);
  OuterLoop loop(problem, cfg, observer);
  const bool second_order = is_second_order(cfg.mode);

  auto terminate = [&](double gnorm, const SymmetricMatrix& H) -> std::optional<RunStatus> {
    if (gnorm > cfg.eps1) return std::nullopt;
    if (!second_order) return RunStatus::first_order;
    if (loop.ensure_eigen(H).lambda_min >= -cfg.eps2) return RunStatus::second_order;
    return std::nullopt;
  };

  auto step = [&](const Vector& g, const SymmetricMatrix& H, double sigma, IterationTrace& record) {
    if (second_order && g.norm() <= cfg.eps1) {
      record.eigen_solve_used = true;
      return second_order_step(g, H, sigma, loop.ensure_eigen(H));
    }
    if (tries_convex_step(cfg.mode)) {
      ConvexAttempt attempt = try_convex_step(g, H, sigma, cfg, &loop.counters());
      if (auto* accepted = std::get_if<StepOutcome>(&attempt)) return std::move(*accepted);
      record.conv_rejected = std::get<Rejected>(attempt).reason;
    }
    record.eigen_solve_used = true;
    return eigen_newton_step(g, H, sigma, cfg, &loop.eigen_at_x(), &loop.counters());
  };

  return loop.execute(terminate, step);
}

RunRecord solve_ar2(const Problem& problem, const SolverConfig& cfg, const IterationObserver& observer) {
  OuterLoop loop(problem, cfg, observer);
  const double theta = cfg.theta_sub_for(problem.n);

  auto terminate = [&](double gnorm, const SymmetricMatrix&) -> std::optional<RunStatus> {
    if (gnorm <= cfg.eps1) return RunStatus::first_order;
    return std::nullopt;
  };

  auto step = [&](const Vector& g, const SymmetricMatrix& H, double sigma, IterationTrace& record) {
    CubicStep cubic = solve_cubic_subproblem(g, H, sigma, theta);
    if (!cubic.converged) throw std::runtime_error("cubic subproblem did not meet its stopping rule");
    record.subproblem_gradient = cubic.model_gradient_norm;
    StepOutcome out;
    out.tag = StepTag::ar2;
    out.model_decrease = cubic.model_decrease;
    out.s = std::move(cubic.s);
    return out;
  };

  return loop.execute(terminate, step);
}

}  // namespace an2c
