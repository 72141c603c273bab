#include "an2c/steps.hpp"

#include <cmath>
#include <sstream>

namespace an2c {

std::string_view to_string(StepTag tag) {
  switch (tag) {
    case StepTag::conv: return "conv";
    case StepTag::neig: return "neig";
    case StepTag::curv: return "curv";
    case StepTag::so: return "so";
    case StepTag::ar2: return "ar2";
  }
  return "?";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::indefinite: return "indefinite";
    case RejectReason::norm_cap: return "norm_cap";
    case RejectReason::residual: return "residual";
  }
  return "?";
}

double model_decrease(const Vector& g, const SymmetricMatrix& H, const Vector& s) {
  return -(g.dot(s) + 0.5 * H.quadratic_form(s));
}

namespace {

void require_finite(const Vector& g, const SymmetricMatrix& H, double sigma) {
  if (!g.allFinite() || !H.all_finite() || !std::isfinite(sigma) || !(sigma > 0.0))
    throw std::invalid_argument("step computation needs finite g, H and a positive sigma");
}

// Unit eigenvector oriented so that g'v <= 0; ties keep the solver's sign.
Vector descent_oriented(const Vector& g, const Vector& v) { return g.dot(v) > 0.0 ? Vector(-v) : v; }

}  // namespace

ConvexAttempt try_convex_step(const Vector& g, const SymmetricMatrix& H, double sigma, const SolverConfig& cfg,
                              EvalCounters* counters) {
  require_finite(g, H, sigma);
  const double gnorm = g.norm();
  const double mu = std::sqrt(cfg.kappa_a * sigma * gnorm);

  FactorizationOutcome probe = probe_spd(H, mu);
  if (counters) ++counters->factorizations;
  if (probe.status != SpdStatus::positive_definite) return Rejected{RejectReason::indefinite};

  const ResidualAccept accept = [&](double r, double snorm, double gn) {
    return r <= std::min(cfg.varsigma2 * mu * snorm, cfg.kappa_theta * gn);
  };
  SolveOptions options;
  options.backend = cfg.backend;
  SolveResult solved;
  try {
    solved = regularized_solve(H, mu, g, accept, options, &*probe.factor);
  } catch (const StepFailure&) {
    return Rejected{RejectReason::residual};
  }

  const double cap = (1.0 + cfg.kappa_theta) / cfg.varsigma1 * std::sqrt(gnorm / (cfg.kappa_a * sigma));
  if (solved.s.norm() > cap) return Rejected{RejectReason::norm_cap};

  StepOutcome out;
  out.tag = StepTag::conv;
  out.residual_norm = solved.residual_norm;
  out.shift = mu;
  out.model_decrease = model_decrease(g, H, solved.s);
  out.s = std::move(solved.s);
  return out;
}

StepOutcome eigen_newton_step(const Vector& g, const SymmetricMatrix& H, double sigma, const SolverConfig& cfg,
                              std::optional<EigenPair>* eigen_cache, EvalCounters* counters) {
  require_finite(g, H, sigma);
  std::optional<EigenPair> local;
  std::optional<EigenPair>& eig = eigen_cache ? *eigen_cache : local;
  if (!eig) {
    eig = min_eigenpair(H, cfg.eig_tol);
    if (counters) ++counters->eigen_solves;
  }

  const double gnorm = g.norm();
  const double base = std::sqrt(sigma * gnorm);
  const double threshold = cfg.kappa_C * base;
  const double lambda = eig->lambda_min;

  StepOutcome out;
  out.lambda_min_used = lambda;
  if (-lambda > threshold) {
    out.tag = StepTag::curv;
    out.s = (threshold / sigma) * descent_oriented(g, eig->v);
    out.model_decrease = model_decrease(g, H, out.s);
    return out;
  }

  const double mu = base + std::max(-lambda, 0.0);
  const ResidualAccept accept = [&](double r, double snorm, double gn) {
    return r <= std::min(cfg.varsigma3 * base * snorm, cfg.kappa_theta * gn);
  };
  SolveOptions options;
  options.backend = cfg.backend;
  SolveResult solved;
  try {
    if (cfg.backend == LinearBackend::direct && counters) ++counters->factorizations;
    solved = regularized_solve(H, mu, g, accept, options);
  } catch (const StepFailure& failure) {
    if (cfg.backend == LinearBackend::conjugate_gradient) {
      options.backend = LinearBackend::direct;
      if (counters) ++counters->factorizations;
      try {
        solved = regularized_solve(H, mu, g, accept, options);
      } catch (const StepFailure& direct_failure) {
        if (!direct_failure.best()) throw;
        solved = *direct_failure.best();
        out.residual_ok = false;
      }
    } else {
      if (!failure.best()) throw;
      solved = *failure.best();
      out.residual_ok = false;
    }
  }
  out.tag = StepTag::neig;
  out.residual_norm = solved.residual_norm;
  out.shift = mu;
  out.model_decrease = model_decrease(g, H, solved.s);
  out.s = std::move(solved.s);
  return out;
}

StepOutcome second_order_step(const Vector& g, const SymmetricMatrix& H, double sigma, const EigenPair& eig) {
  require_finite(g, H, sigma);
  if (!(eig.lambda_min < 0.0))
    throw std::invalid_argument("second-order step needs a negative minimum eigenvalue");
  StepOutcome out;
  out.tag = StepTag::so;
  out.lambda_min_used = eig.lambda_min;
  out.s = (-eig.lambda_min / sigma) * descent_oriented(g, eig.v);
  out.model_decrease = model_decrease(g, H, out.s);
  return out;
}

namespace {

class ViolationLog {
 public:
  explicit ViolationLog(StepTag tag) : tag_(tag) {}

  void at_most(const char* what, double value, double bound, double slack) {
    if (!(value <= bound + slack * std::abs(bound))) add(what, value, "<=", bound);
  }
  void at_least(const char* what, double value, double bound, double slack) {
    if (!(value >= bound - slack * std::abs(bound))) add(what, value, ">=", bound);
  }
  void equal(const char* what, double value, double target, double slack) {
    if (!(std::abs(value - target) <= slack * std::abs(target))) add(what, value, "==", target);
  }
  std::vector<std::string> take() { return std::move(messages_); }

 private:
  void add(const char* what, double value, const char* relation, double bound) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(tag_) << ": " << what << " " << value << " not " << relation << " " << bound;
    messages_.push_back(os.str());
  }
  StepTag tag_;
  std::vector<std::string> messages_;
};

}  // namespace

std::vector<std::string> step_invariant_violations(const StepOutcome& step, const Vector& g,
                                                   const SymmetricMatrix& H, double sigma,
                                                   const SolverConfig& cfg, double slack) {
  ViolationLog log(step.tag);
  const double gnorm = g.norm();
  const double snorm = step.s.norm();
  const double decrease = model_decrease(g, H, step.s);
  if (!(decrease > 0.0)) log.at_least("model decrease", decrease, 0.0, 0.0);

  switch (step.tag) {
    case StepTag::conv: {
      const double mu = std::sqrt(cfg.kappa_a * sigma * gnorm);
      log.at_most("step norm", snorm, (1.0 + cfg.kappa_theta) / cfg.varsigma1 * std::sqrt(gnorm / (cfg.kappa_a * sigma)),
                  slack);
      log.at_least("model decrease", decrease, 0.5 * (1.0 - 2.0 * cfg.varsigma2) * mu * snorm * snorm, slack);
      break;
    }
    case StepTag::neig: {
      const double base = std::sqrt(sigma * gnorm);
      log.at_most("step norm", snorm, (1.0 + cfg.kappa_theta) * std::sqrt(gnorm / sigma), slack);
      log.at_least("model decrease", decrease, (1.0 - cfg.varsigma3) * base * snorm * snorm, slack);
      break;
    }
    case StepTag::curv: {
      const double threshold = cfg.kappa_C * std::sqrt(sigma * gnorm);
      log.equal("step norm", snorm, threshold / sigma, slack);
      log.at_least("model decrease", decrease, 0.5 * sigma * snorm * snorm * snorm, slack);
      if (snorm > 0.0) {
        const Vector v = step.s / snorm;
        log.at_most("curvature v'Hv", H.quadratic_form(v), -threshold, slack);
        log.at_most("slope g'v", g.dot(v), 0.0, 0.0);
      }
      break;
    }
    case StepTag::so: {
      if (step.lambda_min_used) log.equal("step norm", snorm, std::abs(*step.lambda_min_used) / sigma, slack);
      log.at_least("model decrease", decrease, 0.5 * sigma * snorm * snorm * snorm, slack);
      break;
    }
    case StepTag::ar2:
      break;
  }
  return log.take();
}

}  // namespace an2c
