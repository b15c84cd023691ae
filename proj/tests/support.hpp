#pragma once

#include <cstdint>
#include <random>

#include "adi/types.hpp"

namespace testsupport {

// Tridiagonal test operator (sub, diag, super constant bands).
inline adi::SparseMatrix<double> tridiag(adi::Index n, double sub, double diag, double super) {
  adi::SparseMatrix<double> M(n, n);
  M.reserve(Eigen::VectorXi::Constant(int(n), 3));
  for (adi::Index i = 0; i < n; ++i) {
    if (i > 0) M.insert(i, i - 1) = sub;
    M.insert(i, i) = diag;
    if (i + 1 < n) M.insert(i, i + 1) = super;
  }
  M.makeCompressed();
  return M;
}

// Platform-independent uniform [-1, 1) fill: the generator's raw 64-bit
// output is mapped explicitly so every toolchain draws the same matrix.
inline adi::DenseMatrix<double> deterministic_matrix(adi::Index rows, adi::Index cols,
                                                     std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  adi::DenseMatrix<double> M(rows, cols);
  for (adi::Index j = 0; j < cols; ++j) {
    for (adi::Index i = 0; i < rows; ++i) {
      M(i, j) = double(gen() >> 11) * 0x1p-53 * 2.0 - 1.0;
    }
  }
  return M;
}

// Diagonally dominant positive-diagonal draw: spectrum in the right half-plane.
inline adi::DenseMatrix<double> positive_real_dense(adi::Index n, std::uint64_t seed) {
  adi::DenseMatrix<double> F = deterministic_matrix(n, n, seed);
  for (adi::Index i = 0; i < n; ++i) {
    F(i, i) = F.row(i).cwiseAbs().sum() + 1.0;
  }
  return F;
}

}  // namespace testsupport
