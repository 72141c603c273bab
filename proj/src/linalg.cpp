#include "an2c/linalg.hpp"

#include <cmath>
#include <random>
#include <variant>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace an2c {

struct ShiftedFactor::Impl {
  std::variant<Eigen::LLT<DenseMatrix>, Eigen::SimplicialLLT<SparseMatrix>> llt;
};

ShiftedFactor::ShiftedFactor(std::unique_ptr<Impl> impl, double shift) : impl_(std::move(impl)), shift_(shift) {}
ShiftedFactor::ShiftedFactor(ShiftedFactor&&) noexcept = default;
ShiftedFactor& ShiftedFactor::operator=(ShiftedFactor&&) noexcept = default;
ShiftedFactor::~ShiftedFactor() = default;

Vector ShiftedFactor::solve(const Vector& rhs) const {
  return std::visit([&](const auto& llt) -> Vector { return llt.solve(rhs); }, impl_->llt);
}

FactorizationOutcome probe_spd(const SymmetricMatrix& H, double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("shift must be finite and nonnegative");
  if (!H.all_finite()) throw std::invalid_argument("matrix has non-finite entries");
  const Eigen::Index n = H.size();
  auto impl = std::make_unique<ShiftedFactor::Impl>();
  bool ok = false;
  if (H.is_sparse()) {
    SparseMatrix shifted = H.sparse();
    SparseMatrix identity(n, n);
    identity.setIdentity();
    shifted += mu * identity;
    auto& llt = impl->llt.emplace<Eigen::SimplicialLLT<SparseMatrix>>();
    llt.compute(shifted);
    ok = llt.info() == Eigen::Success;
  } else {
    DenseMatrix shifted = H.dense();
    shifted.diagonal().array() += mu;
    auto& llt = impl->llt.emplace<Eigen::LLT<DenseMatrix>>();
    llt.compute(shifted);
    ok = llt.info() == Eigen::Success;
  }
  FactorizationOutcome out;
  if (!ok) return out;
  out.status = SpdStatus::positive_definite;
  out.factor = ShiftedFactor(std::move(impl), mu);
  return out;
}

double shifted_residual_norm(const SymmetricMatrix& H, double mu, const Vector& s, const Vector& g) {
  return (H.multiply(s) + mu * s + g).norm();
}

namespace {

SolveResult direct_solve(const SymmetricMatrix& H, double mu, const Vector& g, const ResidualAccept& accept,
                         const SolveOptions& options, const ShiftedFactor* factor) {
  std::optional<ShiftedFactor> owned;
  if (factor == nullptr || factor->shift() != mu) {
    FactorizationOutcome probe = probe_spd(H, mu);
    if (probe.status != SpdStatus::positive_definite)
      throw StepFailure("shifted matrix is not positive definite", std::nullopt);
    owned = std::move(probe.factor);
    factor = &*owned;
  }
  const double gnorm = g.norm();
  SolveResult best;
  best.s = factor->solve(-g);
  best.residual_norm = shifted_residual_norm(H, mu, best.s, g);
  for (int step = 0; step < std::max(1, options.refinement_steps); ++step) {
    const Vector r = H.multiply(best.s) + mu * best.s + g;
    SolveResult refined;
    refined.s = best.s - factor->solve(r);
    refined.residual_norm = shifted_residual_norm(H, mu, refined.s, g);
    if (refined.residual_norm <= best.residual_norm) best = std::move(refined);
    if (accept(best.residual_norm, best.s.norm(), gnorm)) return best;
  }
  throw StepFailure("residual condition not met after iterative refinement", std::move(best));
}

SolveResult cg_solve(const SymmetricMatrix& H, double mu, const Vector& g, const ResidualAccept& accept,
                     const SolveOptions& options) {
  const Eigen::Index n = g.size();
  const Eigen::Index budget = options.cg_budget > 0 ? options.cg_budget : 5 * n;
  const double gnorm = g.norm();
  Vector s = Vector::Zero(n);
  Vector r = g;  // (H + mu I) s + g
  Vector p = -r;
  double rr = r.squaredNorm();
  for (Eigen::Index it = 0; it < budget; ++it) {
    const Vector Ap = H.multiply(p) + mu * p;
    const double curvature = p.dot(Ap);
    if (!(curvature > 0.0))
      throw StepFailure("conjugate gradient met nonpositive curvature", SolveResult{s, r.norm()});
    const double alpha = rr / curvature;
    s += alpha * p;
    r += alpha * Ap;
    const double rr_next = r.squaredNorm();
    if (accept(std::sqrt(rr_next), s.norm(), gnorm)) {
      // The recurrence residual drifts; confirm with the true one.
      const double true_residual = shifted_residual_norm(H, mu, s, g);
      if (accept(true_residual, s.norm(), gnorm)) return SolveResult{s, true_residual};
      r = H.multiply(s) + mu * s + g;
      p = -r;
      rr = r.squaredNorm();
      continue;
    }
    p = -r + (rr_next / rr) * p;
    rr = rr_next;
  }
  throw StepFailure("conjugate gradient budget exhausted",
                    SolveResult{s, shifted_residual_norm(H, mu, s, g)});
}

}  // namespace

SolveResult regularized_solve(const SymmetricMatrix& H, double mu, const Vector& g, const ResidualAccept& accept,
                              const SolveOptions& options, const ShiftedFactor* factor) {
  if (g.size() != H.size()) throw std::invalid_argument("gradient and matrix sizes differ");
  if (!g.allFinite()) throw std::invalid_argument("gradient has non-finite entries");
  if (options.backend == LinearBackend::conjugate_gradient) return cg_solve(H, mu, g, accept, options);
  return direct_solve(H, mu, g, accept, options, factor);
}

// ---------------------------------------------------------------------------

namespace {

double absolute_tolerance(const SymmetricMatrix& H, double tol) { return tol * std::max(1.0, H.inf_norm()); }

EigenPair dense_min_eigenpair(const SymmetricMatrix& H) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(H.to_dense());
  if (solver.info() != Eigen::Success) throw EigenFailure("dense eigendecomposition failed");
  EigenPair pair;
  pair.lambda_min = solver.eigenvalues()[0];
  pair.v = solver.eigenvectors().col(0).normalized();
  return pair;
}

double eigen_residual(const SymmetricMatrix& H, const EigenPair& pair) {
  return (H.multiply(pair.v) - pair.lambda_min * pair.v).norm();
}

}  // namespace

std::optional<EigenPair> lanczos_min_eigenpair(const SymmetricMatrix& H, double tol, const Vector& start,
                                               Eigen::Index max_basis, Vector* ritz) {
  const Eigen::Index n = H.size();
  const Eigen::Index m = std::min(n, max_basis);
  const double abs_tol = absolute_tolerance(H, tol);
  DenseMatrix Q(n, m);
  Vector alpha(m), beta(m);
  Vector q = start.normalized();
  Vector last_ritz = q;

  for (Eigen::Index j = 0; j < m; ++j) {
    Q.col(j) = q;
    Vector w = H.multiply(q);
    alpha[j] = q.dot(w);
    w -= alpha[j] * q;
    if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    beta[j] = w.norm();

    const bool exhausted = j + 1 == m;
    const bool breakdown = beta[j] <= 1e-14 * std::max(1.0, std::abs(alpha[j]));
    if (j < 20 || (j + 1) % 5 == 0 || exhausted || breakdown) {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> tri;
      tri.computeFromTridiagonal(alpha.head(j + 1), beta.head(j), Eigen::ComputeEigenvectors);
      const Vector u = tri.eigenvectors().col(0);
      last_ritz = (Q.leftCols(j + 1) * u).normalized();
      if (beta[j] * std::abs(u[j]) <= abs_tol || breakdown || exhausted) {
        EigenPair pair{tri.eigenvalues()[0], last_ritz};
        pair.lambda_min = pair.v.dot(H.multiply(pair.v));
        if (eigen_residual(H, pair) <= abs_tol) return pair;
        if (breakdown || exhausted) break;
      }
    }
    q = w / beta[j];
  }
  if (ritz != nullptr) *ritz = last_ritz;
  return std::nullopt;
}

EigenPair min_eigenpair(const SymmetricMatrix& H, double tol, const EigenOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("eigen tolerance must be positive");
  if (!H.all_finite()) throw std::invalid_argument("matrix has non-finite entries");
  const bool use_lanczos = options.method == EigenMethod::lanczos ||
                           (options.method == EigenMethod::automatic && H.size() > kDenseLimit);
  if (use_lanczos) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Vector start(H.size());
    for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = uniform(rng);
    Vector ritz;
    if (auto pair = lanczos_min_eigenpair(H, tol, start, options.max_basis, &ritz)) return *pair;
    if (auto pair = lanczos_min_eigenpair(H, tol, ritz, options.max_basis)) return *pair;
  }
  return dense_min_eigenpair(H);
}

}  // namespace an2c
