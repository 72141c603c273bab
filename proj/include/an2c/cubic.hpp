#pragma once

#include "an2c/types.hpp"

namespace an2c {

/// Approximate minimizer of m(s) = g's + s'Hs/2 + (sigma/3)||s||^3.
struct CubicStep {
  Vector s;
  double model_gradient_norm = 0.0;  // ||g + Hs + sigma ||s|| s||, recomputed
  double model_decrease = 0.0;       // m(0) - m(s)
  Eigen::Index krylov_dimension = 0;
  bool used_dense_fallback = false;
  bool converged = false;            // stopping test met
};

/// Stopping test on the subproblem: the model gradient is at most
/// theta * sigma * ||s||^2 / 2.
inline bool cubic_stop_test(double model_gradient_norm, double sigma, double theta, double step_norm) {
  return model_gradient_norm <= 0.5 * theta * sigma * step_norm * step_norm;
}

/// Lanczos (Krylov) minimization of the cubic model, growing the subspace one
/// vector at a time and testing the stopping rule after each expansion. After
/// `max_basis` vectors (0 means n) without success the problem is solved
/// exactly in the eigenbasis of H as a restart.
CubicStep solve_cubic_subproblem(const Vector& g, const SymmetricMatrix& H, double sigma, double theta,
                                 Eigen::Index max_basis = 0);

/// Exact global minimizer via the eigendecomposition of H (hard case included).
CubicStep solve_cubic_dense(const Vector& g, const SymmetricMatrix& H, double sigma);

double cubic_model_decrease(const Vector& g, const SymmetricMatrix& H, double sigma, const Vector& s);

}  // namespace an2c
