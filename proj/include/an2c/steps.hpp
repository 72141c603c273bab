#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "an2c/config.hpp"
#include "an2c/linalg.hpp"

namespace an2c {

enum class StepTag { conv, neig, curv, so, ar2 };
std::string_view to_string(StepTag tag);

struct StepOutcome {
  Vector s;
  StepTag tag = StepTag::conv;
  double residual_norm = 0.0;  // 0 for curv and so
  std::optional<double> lambda_min_used;
  double model_decrease = 0.0;  // -(g's + s'Hs/2)
  double shift = 0.0;           // regularization added to H, when a system was solved
  // False only when the direct solver could not push the residual under the
  // required bound; the step is still the best available solution.
  bool residual_ok = true;
};

enum class RejectReason { indefinite, norm_cap, residual };
std::string_view to_string(RejectReason reason);

struct Rejected {
  RejectReason reason;
};

using ConvexAttempt = std::variant<StepOutcome, Rejected>;

/// -(g's + s'Hs/2)
double model_decrease(const Vector& g, const SymmetricMatrix& H, const Vector& s);

/// Newton step regularized by sqrt(kappa_a sigma ||g||). Rejected when the
/// shifted matrix is not positive definite, the residual bound fails, or the
/// step exceeds its norm cap.
ConvexAttempt try_convex_step(const Vector& g, const SymmetricMatrix& H, double sigma, const SolverConfig& cfg,
                              EvalCounters* counters = nullptr);

/// Either a Newton step regularized by sqrt(sigma ||g||) + [-lambda_min]_+ or,
/// when the curvature is too negative, a fixed-length move along the minimum
/// eigenvector. `eigen_cache` (when given) is reused if filled and filled
/// otherwise, so one point needs one eigen-solve.
StepOutcome eigen_newton_step(const Vector& g, const SymmetricMatrix& H, double sigma, const SolverConfig& cfg,
                              std::optional<EigenPair>* eigen_cache = nullptr, EvalCounters* counters = nullptr);

/// Pure negative-curvature step (-lambda_min / sigma) v. Requires lambda_min < 0.
StepOutcome second_order_step(const Vector& g, const SymmetricMatrix& H, double sigma, const EigenPair& eig);

/// Norm caps/identities and model-decrease lower bounds for the step's tag,
/// each checked with relative slack. Returns one message per violation.
std::vector<std::string> step_invariant_violations(const StepOutcome& step, const Vector& g,
                                                   const SymmetricMatrix& H, double sigma,
                                                   const SolverConfig& cfg, double slack = 1e-10);

}  // namespace an2c
