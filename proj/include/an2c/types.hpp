#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace an2c {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Hessians above this dimension use the sparse representation.
inline constexpr Eigen::Index kDenseLimit = 200;

/// Symmetric matrix stored either densely or as a full (both triangles)
/// compressed sparse matrix. Both forms are exactly symmetric.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(DenseMatrix m) : storage_(std::move(m)) {}
  explicit SymmetricMatrix(SparseMatrix m) : storage_(std::move(m)) {}

  Eigen::Index size() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(storage_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(storage_); }

  Vector multiply(const Vector& v) const;
  double quadratic_form(const Vector& v) const;
  double inf_norm() const;
  bool all_finite() const;
  bool exactly_symmetric() const;
  DenseMatrix to_dense() const;

 private:
  std::variant<DenseMatrix, SparseMatrix> storage_;
};

/// Accumulates Hessian contributions; each off-diagonal add writes the
/// same value to both triangles so the result is symmetric bit-for-bit.
class HessianBuilder {
 public:
  explicit HessianBuilder(Eigen::Index n, bool sparse);
  explicit HessianBuilder(Eigen::Index n) : HessianBuilder(n, n > kDenseLimit) {}

  void add(Eigen::Index i, Eigen::Index j, double value);
  SymmetricMatrix build() &&;

 private:
  Eigen::Index n_;
  bool sparse_;
  DenseMatrix dense_;
  std::vector<Eigen::Triplet<double>> triplets_;
};

struct EvalCounters {
  std::int64_t f_evals = 0;
  std::int64_t g_evals = 0;
  std::int64_t H_evals = 0;
  std::int64_t factorizations = 0;
  std::int64_t eigen_solves = 0;
};

}  // namespace an2c
