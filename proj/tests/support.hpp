#pragma once

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "an2c/types.hpp"

namespace an2c::testing {

inline SymmetricMatrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return SymmetricMatrix(DenseMatrix(v.asDiagonal()));
}

inline Vector vec(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return v;
}

inline DenseMatrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<DenseMatrix> qr(a);
  return qr.householderQ() * DenseMatrix::Identity(n, n);
}

// Q diag(lambda) Q', symmetrized exactly by averaging with its transpose.
inline SymmetricMatrix with_spectrum(const Vector& lambda, std::mt19937_64& rng) {
  const DenseMatrix q = random_orthogonal(lambda.size(), rng);
  DenseMatrix m = q * lambda.asDiagonal() * q.transpose();
  DenseMatrix sym = 0.5 * (m + m.transpose());
  return SymmetricMatrix(sym);
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace an2c::testing
