#include "an2c/types.hpp"

#include <cmath>

namespace an2c {

Eigen::Index SymmetricMatrix::size() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

Vector SymmetricMatrix::multiply(const Vector& v) const {
  return std::visit([&](const auto& m) -> Vector { return m * v; }, storage_);
}

double SymmetricMatrix::quadratic_form(const Vector& v) const { return v.dot(multiply(v)); }

double SymmetricMatrix::inf_norm() const {
  if (is_sparse()) {
    const SparseMatrix& m = sparse();
    Vector row_sums = Vector::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
    return m.rows() == 0 ? 0.0 : row_sums.maxCoeff();
  }
  const DenseMatrix& m = dense();
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

bool SymmetricMatrix::all_finite() const {
  if (is_sparse()) {
    const SparseMatrix& m = sparse();
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it)
        if (!std::isfinite(it.value())) return false;
    return true;
  }
  return dense().allFinite();
}

bool SymmetricMatrix::exactly_symmetric() const {
  if (is_sparse()) {
    const SparseMatrix& m = sparse();
    SparseMatrix t = m.transpose();
    for (int k = 0; k < m.outerSize(); ++k) {
      SparseMatrix::InnerIterator a(m, k), b(t, k);
      for (; a && b; ++a, ++b)
        if (a.row() != b.row() || a.value() != b.value()) return false;
      if (a || b) return false;
    }
    return true;
  }
  const DenseMatrix& m = dense();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

DenseMatrix SymmetricMatrix::to_dense() const {
  if (is_sparse()) return DenseMatrix(sparse());
  return dense();
}

HessianBuilder::HessianBuilder(Eigen::Index n, bool sparse) : n_(n), sparse_(sparse) {
  if (!sparse_) dense_ = DenseMatrix::Zero(n, n);
}

void HessianBuilder::add(Eigen::Index i, Eigen::Index j, double value) {
  if (sparse_) {
    triplets_.emplace_back(i, j, value);
    if (i != j) triplets_.emplace_back(j, i, value);
    return;
  }
  dense_(i, j) += value;
  if (i != j) dense_(j, i) += value;
}

SymmetricMatrix HessianBuilder::build() && {
  if (!sparse_) return SymmetricMatrix(std::move(dense_));
  SparseMatrix m(n_, n_);
  m.setFromTriplets(triplets_.begin(), triplets_.end());
  m.makeCompressed();
  return SymmetricMatrix(std::move(m));
}

}  // namespace an2c
