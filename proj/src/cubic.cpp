#include "an2c/cubic.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace an2c {

double cubic_model_decrease(const Vector& g, const SymmetricMatrix& H, double sigma, const Vector& s) {
  const double snorm = s.norm();
  return -(g.dot(s) + 0.5 * H.quadratic_form(s) + sigma / 3.0 * snorm * snorm * snorm);
}

namespace {

double model_gradient_norm(const Vector& g, const SymmetricMatrix& H, double sigma, const Vector& s) {
  return (g + H.multiply(s) + sigma * s.norm() * s).norm();
}

CubicStep finish(const Vector& g, const SymmetricMatrix& H, double sigma, double theta, Vector s) {
  CubicStep out;
  out.model_gradient_norm = model_gradient_norm(g, H, sigma, s);
  out.model_decrease = cubic_model_decrease(g, H, sigma, s);
  out.converged = cubic_stop_test(out.model_gradient_norm, sigma, theta, s.norm());
  out.s = std::move(s);
  return out;
}

struct SecularProbe {
  double norm_y;       // ||y(lambda)||
  double inverse_form; // y' (A + lambda I)^{-1} y
};

// Root of ||y(lambda)|| = lambda / sigma on (lower, inf), where ||y|| decreases
// and lambda / sigma increases. Newton on 1/||y|| - sigma/lambda, safeguarded
// by bisection. `probe` returns nullopt when A + lambda I is not positive
// definite.
double secular_root(const std::function<std::optional<SecularProbe>(double)>& probe, double lower, double sigma,
                    double beta) {
  double lo = std::max(lower, 0.0);
  double hi = lo + std::sqrt(sigma * beta) + std::numeric_limits<double>::min();
  for (int i = 0; i < 200; ++i) {
    const auto p = probe(hi);
    if (p && p->norm_y - hi / sigma <= 0.0) break;
    lo = hi;
    hi = 2.0 * hi + 1e-300;
  }

  double lambda = hi;
  for (int it = 0; it < 500; ++it) {
    const auto p = probe(lambda);
    if (!p || !(p->norm_y > 0.0)) {
      lo = lambda;
      lambda = 0.5 * (lo + hi);
      continue;
    }
    const double h = p->norm_y - lambda / sigma;
    if (std::abs(h) <= 1e-15 * lambda / sigma) return lambda;
    if (h > 0.0) lo = lambda; else hi = lambda;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return hi;

    const double dnorm = -p->inverse_form / p->norm_y;
    const double phi = 1.0 / p->norm_y - sigma / lambda;
    const double dphi = -dnorm / (p->norm_y * p->norm_y) + sigma / (lambda * lambda);
    double next = lambda - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lambda = next;
  }
  return hi;
}

// Solves (T + lambda I) y = -beta e1 for symmetric tridiagonal T.
struct TridiagonalSolve {
  Vector y;
  double inverse_form = 0.0;
};

std::optional<TridiagonalSolve> tridiagonal_solve(const Vector& diag, const Vector& off, double lambda,
                                                  double beta) {
  const Eigen::Index m = diag.size();
  Vector d(m), l(m);
  d[0] = diag[0] + lambda;
  if (!(d[0] > 0.0)) return std::nullopt;
  for (Eigen::Index i = 1; i < m; ++i) {
    l[i] = off[i - 1] / d[i - 1];
    d[i] = diag[i] + lambda - l[i] * off[i - 1];
    if (!(d[i] > 0.0)) return std::nullopt;
  }
  // L z = -beta e1, then D w = z, then L' y = w.
  Vector y(m);
  double z = -beta;
  y[0] = z;
  for (Eigen::Index i = 1; i < m; ++i) {
    z = -l[i] * z;
    y[i] = z;
  }
  for (Eigen::Index i = 0; i < m; ++i) y[i] /= d[i];
  for (Eigen::Index i = m - 2; i >= 0; --i) y[i] -= l[i + 1] * y[i + 1];

  TridiagonalSolve out;
  double u = y[0];
  out.inverse_form = u * u / d[0];
  for (Eigen::Index i = 1; i < m; ++i) {
    u = y[i] - l[i] * u;
    out.inverse_form += u * u / d[i];
  }
  out.y = std::move(y);
  return out;
}

Vector solve_tridiagonal_cubic(const Vector& diag, const Vector& off, double sigma, double beta) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> tri;
  tri.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  const double theta_min = tri.eigenvalues()[0];
  const double lower = std::max(0.0, -theta_min);
  const double lambda = secular_root(
      [&](double lam) -> std::optional<SecularProbe> {
        auto solved = tridiagonal_solve(diag, off, lam, beta);
        if (!solved) return std::nullopt;
        return SecularProbe{solved->y.norm(), solved->inverse_form};
      },
      lower, sigma, beta);
  auto solved = tridiagonal_solve(diag, off, lambda, beta);
  if (!solved) throw std::runtime_error("tridiagonal cubic subproblem: shifted matrix lost definiteness");
  return solved->y;
}

}  // namespace

CubicStep solve_cubic_dense(const Vector& g, const SymmetricMatrix& H, double sigma) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(H.to_dense());
  if (eig.info() != Eigen::Success) throw std::runtime_error("cubic subproblem: eigendecomposition failed");
  const Vector& values = eig.eigenvalues();
  const DenseMatrix& vectors = eig.eigenvectors();
  const Vector c = vectors.transpose() * g;
  const double beta = g.norm();
  const double lambda_min = values[0];
  const double lower = std::max(0.0, -lambda_min);
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());

  Vector y(values.size());
  // Hard case: g has (numerically) no component along the leftmost
  // eigenspace and the remaining components are too short at lambda = lower.
  if (lower > 0.0) {
    double rest = 0.0;
    bool orthogonal = true;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double gap = values[i] - lambda_min;
      if (gap <= 1e-12 * scale) {
        orthogonal = orthogonal && std::abs(c[i]) <= 1e-12 * std::max(beta, 1e-300) + 1e-300;
        y[i] = 0.0;
      } else {
        y[i] = -c[i] / (values[i] + lower);
        rest += y[i] * y[i];
      }
    }
    const double target = lower / sigma;
    if (orthogonal && std::sqrt(rest) <= target) {
      y[0] = std::sqrt(std::max(0.0, target * target - rest));
      return finish(g, H, sigma, 0.0, vectors * y);
    }
  }

  const double lambda = secular_root(
      [&](double lam) -> std::optional<SecularProbe> {
        SecularProbe p{0.0, 0.0};
        for (Eigen::Index i = 0; i < values.size(); ++i) {
          const double d = values[i] + lam;
          if (!(d > 0.0)) return std::nullopt;
          const double yi = c[i] / d;
          p.norm_y += yi * yi;
          p.inverse_form += yi * yi / d;
        }
        p.norm_y = std::sqrt(p.norm_y);
        return p;
      },
      lower, sigma, beta);
  for (Eigen::Index i = 0; i < values.size(); ++i) y[i] = -c[i] / (values[i] + lambda);
  CubicStep out = finish(g, H, sigma, 0.0, vectors * y);
  out.krylov_dimension = values.size();
  return out;
}

CubicStep solve_cubic_subproblem(const Vector& g, const SymmetricMatrix& H, double sigma, double theta,
                                 Eigen::Index max_basis) {
  if (!(sigma > 0.0) || !(theta > 0.0)) throw std::invalid_argument("cubic subproblem needs sigma, theta > 0");
  const Eigen::Index n = g.size();
  const double beta0 = g.norm();
  if (beta0 == 0.0) {
    // Krylov space is empty; only the eigenbasis can find a descent direction.
    CubicStep out = solve_cubic_dense(g, H, sigma);
    out.used_dense_fallback = true;
    out.converged = cubic_stop_test(out.model_gradient_norm, sigma, theta, out.s.norm());
    return out;
  }
  const Eigen::Index m = max_basis > 0 ? std::min(max_basis, n) : n;

  DenseMatrix Q(n, m);
  Vector alpha(m), beta(m);
  Vector q = g / beta0;
  for (Eigen::Index j = 0; j < m; ++j) {
    Q.col(j) = q;
    Vector w = H.multiply(q);
    alpha[j] = q.dot(w);
    w -= alpha[j] * q;
    if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    beta[j] = w.norm();

    const Vector y = solve_tridiagonal_cubic(alpha.head(j + 1), beta.head(j), sigma, beta0);
    const double ynorm = y.norm();
    const bool breakdown = beta[j] <= 1e-14 * std::max(1.0, std::abs(alpha[j]));
    if (breakdown || j + 1 == m || cubic_stop_test(beta[j] * std::abs(y[j]), sigma, theta, ynorm)) {
      CubicStep out = finish(g, H, sigma, theta, Q.leftCols(j + 1) * y);
      out.krylov_dimension = j + 1;
      if (out.converged) return out;
      if (breakdown || j + 1 == m) break;
    }
    q = w / beta[j];
  }

  CubicStep out = solve_cubic_dense(g, H, sigma);
  out.used_dense_fallback = true;
  out.converged = cubic_stop_test(out.model_gradient_norm, sigma, theta, out.s.norm());
  return out;
}

}  // namespace an2c
