#pragma once

#include <memory>
#include <string>

#include <Eigen/SparseLU>

#include "adi/types.hpp"

namespace adi {

/// Cached triangular factorization of M + alpha*I, reusable for any number of
/// right-hand sides.  Sparse inputs use a sparse LU with partial pivoting;
/// dense inputs a dense partially pivoted LU.
template <typename Scalar>
class ShiftedSolver {
 public:
  ShiftedSolver() = default;

  /// Factorizes M + alpha*I for sparse M.
  ShiftedSolver(const SparseMatrix<Scalar>& M, Scalar alpha) : alpha_(alpha), n_(M.rows()) {
    check_square(M.rows(), M.cols(), alpha);
    Eigen::SparseMatrix<Scalar> shifted(M);  // column-major copy for the factorization
    shifted += shift_identity(M.rows(), alpha);
    shifted.makeCompressed();
    sparse_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<Scalar>>>();
    sparse_->compute(shifted);
    if (sparse_->info() != Eigen::Success) {
      throw SingularShift("shifted_factorize: sparse factorization of M + alpha*I failed (alpha=" +
                          std::to_string(alpha) + ")");
    }
    // The sparse LU exposes no pivot magnitudes, so near-singularity is
    // detected by a one-column round-trip probe instead.
    DenseMatrix<Scalar> probe = DenseMatrix<Scalar>::Ones(n_, 1);
    DenseMatrix<Scalar> back = shifted * sparse_->solve(probe);
    if (!((back - probe).norm() <= Scalar(1e-6) * probe.norm())) {
      throw SingularShift("shifted_factorize: M + alpha*I numerically singular (alpha=" +
                          std::to_string(alpha) + ")");
    }
  }

  /// Factorizes M + alpha*I for dense M.
  ShiftedSolver(const DenseMatrix<Scalar>& M, Scalar alpha) : alpha_(alpha), n_(M.rows()) {
    check_square(M.rows(), M.cols(), alpha);
    DenseMatrix<Scalar> shifted = M;
    shifted.diagonal().array() += alpha;
    const Scalar norm = shifted.template lpNorm<Eigen::Infinity>();
    dense_ = std::make_shared<Eigen::PartialPivLU<DenseMatrix<Scalar>>>(shifted);
    const Scalar min_pivot = dense_->matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot > Scalar(1e-14) * norm)) {
      throw SingularShift("shifted_factorize: M + alpha*I numerically singular (alpha=" +
                          std::to_string(alpha) + ")");
    }
  }

  /// Solves (M + alpha*I) Y = R for a block right-hand side.
  template <typename Derived>
  DenseMatrix<Scalar> solve(const Eigen::MatrixBase<Derived>& R) const {
    if (R.rows() != n_) {
      throw DimensionMismatch("solve_shifted: right-hand side has " + std::to_string(R.rows()) +
                              " rows, solver dimension is " + std::to_string(n_));
    }
    const DenseMatrix<Scalar> rhs = R;
    if (sparse_) return sparse_->solve(rhs);
    return dense_->solve(rhs);
  }

  Scalar alpha() const { return alpha_; }
  Index dim() const { return n_; }

 private:
  static void check_square(Index rows, Index cols, Scalar alpha) {
    if (rows != cols) throw DimensionMismatch("shifted_factorize: matrix must be square");
    if (!(alpha > Scalar(0))) throw SingularShift("shifted_factorize: shift must be positive");
  }

  static Eigen::SparseMatrix<Scalar> shift_identity(Index n, Scalar alpha) {
    Eigen::SparseMatrix<Scalar> id(n, n);
    id.setIdentity();
    return Eigen::SparseMatrix<Scalar>(alpha * id);
  }

  Scalar alpha_ = Scalar(0);
  Index n_ = 0;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Scalar>>> sparse_;
  std::shared_ptr<Eigen::PartialPivLU<DenseMatrix<Scalar>>> dense_;
};

template <typename Scalar>
ShiftedSolver<Scalar> shifted_factorize(const SparseMatrix<Scalar>& M, Scalar alpha) {
  return ShiftedSolver<Scalar>(M, alpha);
}

template <typename Derived>
ShiftedSolver<typename Derived::Scalar> shifted_factorize(const Eigen::MatrixBase<Derived>& M,
                                                          typename Derived::Scalar alpha) {
  return ShiftedSolver<typename Derived::Scalar>(M, alpha);
}

template <typename Scalar, typename Derived>
DenseMatrix<Scalar> solve_shifted(const ShiftedSolver<Scalar>& s,
                                  const Eigen::MatrixBase<Derived>& R) {
  return s.solve(R);
}

}  // namespace adi
