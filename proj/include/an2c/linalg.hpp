#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>

#include "an2c/types.hpp"

namespace an2c {

enum class SpdStatus { positive_definite, indefinite };

/// Cholesky factor of H + mu*I. Move-only; owned by a single solve.
class ShiftedFactor {
 public:
  ShiftedFactor(ShiftedFactor&&) noexcept;
  ShiftedFactor& operator=(ShiftedFactor&&) noexcept;
  ~ShiftedFactor();

  double shift() const { return shift_; }
  Vector solve(const Vector& rhs) const;

 private:
  struct Impl;
  friend struct FactorizationOutcome probe_spd(const SymmetricMatrix& H, double mu);
  ShiftedFactor(std::unique_ptr<Impl> impl, double shift);
  std::unique_ptr<Impl> impl_;
  double shift_ = 0.0;
};

struct FactorizationOutcome {
  SpdStatus status = SpdStatus::indefinite;
  std::optional<ShiftedFactor> factor;  // present iff positive definite
};

/// Attempts a Cholesky factorization of H + mu*I; every pivot must be
/// strictly positive for the result to be positive definite.
FactorizationOutcome probe_spd(const SymmetricMatrix& H, double mu);

struct SolveResult {
  Vector s;
  double residual_norm = 0.0;  // ||(H + mu I) s + g||, recomputed from s
};

/// Predicate on (residual norm, step norm, gradient norm).
using ResidualAccept = std::function<bool(double, double, double)>;

enum class LinearBackend { direct, conjugate_gradient };

struct SolveOptions {
  LinearBackend backend = LinearBackend::direct;
  Eigen::Index cg_budget = 0;  // 0 selects 5n iterations
  int refinement_steps = 3;     // direct backend: at least one is always taken
};

/// Thrown when the residual predicate cannot be met. Carries the best
/// iterate found so callers can decide how to fall back.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, std::optional<SolveResult> best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const std::optional<SolveResult>& best() const { return best_; }

 private:
  std::optional<SolveResult> best_;
};

double shifted_residual_norm(const SymmetricMatrix& H, double mu, const Vector& s, const Vector& g);

/// Solves (H + mu I) s = -g until `accept` holds. The direct backend reuses
/// `factor` when its shift equals mu (refactoring otherwise) and applies iterative
/// refinement; the CG backend iterates until the predicate passes.
SolveResult regularized_solve(const SymmetricMatrix& H, double mu, const Vector& g,
                              const ResidualAccept& accept, const SolveOptions& options = {},
                              const ShiftedFactor* factor = nullptr);

struct EigenPair {
  double lambda_min = 0.0;
  Vector v;  // unit norm
};

enum class EigenMethod { automatic, dense, lanczos };

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  Eigen::Index max_basis = 200;
  std::uint64_t seed = 0x5eed;
};

class EigenFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimum eigenpair with ||Hv - lambda v|| <= tol * max(1, ||H||_inf).
/// Dense eigendecomposition up to kDenseLimit, Lanczos (one restart, then
/// dense fallback) above. `method` can force either path.
EigenPair min_eigenpair(const SymmetricMatrix& H, double tol, const EigenOptions& options = {});

/// One Lanczos run with full reorthogonalization from `start`. Returns the
/// converged pair, or nullopt with the last Ritz vector in `ritz` when the
/// basis budget is exhausted first.
std::optional<EigenPair> lanczos_min_eigenpair(const SymmetricMatrix& H, double tol, const Vector& start,
                                               Eigen::Index max_basis, Vector* ritz = nullptr);

}  // namespace an2c
