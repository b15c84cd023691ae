#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "adi/care.hpp"
#include "adi/lyap.hpp"
#include "adi/shifted_solver.hpp"
#include "adi/types.hpp"

namespace adi {

// Brute-force reference solvers for verification.  Everything here builds
// dense n^2 x n^2 or repeatedly factored n x n objects and is capped at
// kOracleMaxDim; nothing in this header is meant for production-size runs.

/// Column-stacking vectorization.
template <typename Derived>
DenseVector<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& X) {
  return X.derived().reshaped();
}

/// Inverse of vec for the given shape.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> unvec(const Eigen::MatrixBase<Derived>& v, Index rows,
                                            Index cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvec: size does not match shape");
  return v.derived().reshaped(rows, cols);
}

/// Dense Kronecker product A (x) B.
template <typename DerivedA, typename DerivedB>
DenseMatrix<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& A_expr,
                                            const Eigen::MatrixBase<DerivedB>& B_expr) {
  using Scalar = typename DerivedA::Scalar;
  const DenseMatrix<Scalar> A = A_expr;
  const DenseMatrix<Scalar> B = B_expr;
  DenseMatrix<Scalar> K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

/// Assembled n^2 x n^2 operator F^T (x) I + I (x) F^T, so that the Lyapunov
/// equation F^T X + X F = Q reads (F^T (x) I + I (x) F^T) vec(X) = vec(Q).
template <typename Scalar>
class KronOperator {
 public:
  template <typename Derived>
  explicit KronOperator(const Eigen::MatrixBase<Derived>& F) : n_(F.rows()) {
    if (F.rows() != F.cols()) throw DimensionMismatch("KronOperator: F must be square");
    if (n_ > kOracleMaxDim) {
      throw DenseThresholdExceeded("KronOperator: n = " + std::to_string(n_) +
                                   " exceeds the oracle cap " + std::to_string(kOracleMaxDim));
    }
    const DenseMatrix<Scalar> Ft = F.transpose();
    M_ = DenseMatrix<Scalar>::Zero(n_ * n_, n_ * n_);
    for (Index b = 0; b < n_; ++b) M_.block(b * n_, b * n_, n_, n_) = Ft;  // I (x) F^T
    for (Index i = 0; i < n_; ++i) {                                       // F^T (x) I
      for (Index j = 0; j < n_; ++j) {
        if (Ft(i, j) == Scalar(0)) continue;
        M_.block(i * n_, j * n_, n_, n_).diagonal().array() += Ft(i, j);
      }
    }
    lu_.compute(M_);
    if (!lu_.isInvertible()) {
      throw SingularOperator("KronOperator: operator numerically singular (rank " +
                             std::to_string(lu_.rank()) + " of " + std::to_string(n_ * n_) + ")");
    }
    rcond_ = lu_.rcond();
    if (!(rcond_ > Scalar(1e-14))) {
      throw SingularOperator("KronOperator: operator numerically singular (rcond = " +
                             std::to_string(rcond_) + ")");
    }
  }

  Index dimension() const { return n_; }
  const DenseMatrix<Scalar>& matrix() const { return M_; }

  /// Reciprocal-condition-based estimate of cond_1 of the operator.
  Scalar condition_estimate() const { return Scalar(1) / rcond_; }

  DenseVector<Scalar> solve(const DenseVector<Scalar>& q) const {
    if (q.size() != n_ * n_) throw DimensionMismatch("KronOperator: rhs has wrong length");
    return lu_.solve(q);
  }

 private:
  Index n_;
  DenseMatrix<Scalar> M_;
  Eigen::FullPivLU<DenseMatrix<Scalar>> lu_;  // full pivoting: honest rank for singular spectra
  Scalar rcond_ = Scalar(0);
};

/// Direct solution of F^T X + X F = Q through the straightened linear system.
/// The raw solution's asymmetry must stay below 1e-10 relative; the returned
/// matrix is its symmetric part.
template <typename DerivedF, typename DerivedQ>
DenseMatrix<typename DerivedF::Scalar> lyap_kron_solve(const Eigen::MatrixBase<DerivedF>& F,
                                                       const Eigen::MatrixBase<DerivedQ>& Q) {
  using Scalar = typename DerivedF::Scalar;
  if (Q.rows() != F.rows() || Q.cols() != F.rows()) {
    throw DimensionMismatch("lyap_kron_solve: Q must match F");
  }
  KronOperator<Scalar> op(F);
  const DenseMatrix<Scalar> X = unvec(op.solve(vec(Q.derived())), F.rows(), F.rows());
  const Scalar scale = std::max(Scalar(1), X.norm());
  if (!((X - X.transpose()).norm() <= Scalar(1e-10) * scale)) {
    throw SolverError("lyap_kron_solve: solution asymmetry exceeds tolerance");
  }
  return ((X + X.transpose()) / Scalar(2)).eval();
}

template <typename Scalar, typename DerivedQ>
DenseMatrix<Scalar> lyap_kron_solve(const SparseMatrix<Scalar>& F,
                                    const Eigen::MatrixBase<DerivedQ>& Q) {
  return lyap_kron_solve(DenseMatrix<Scalar>(F), Q.derived());
}

namespace detail {

template <typename Scalar>
void oracle_size_check(const char* who, Index n) {
  if (n > kOracleMaxDim) {
    throw DenseThresholdExceeded(std::string(who) + ": n exceeds the oracle cap " +
                                 std::to_string(kOracleMaxDim));
  }
}

}  // namespace detail

/// k sweeps of the dense single-parameter alternating scheme
///   (F^T + alpha I) X_{j+1/2} = Q - X_j (F - alpha I)
///   X_{j+1} (F + alpha I)     = Q - (F^T - alpha I) X_{j+1/2}
/// from X_0 = 0.
template <typename DerivedF, typename DerivedQ>
DenseMatrix<typename DerivedF::Scalar> adi1_dense(const Eigen::MatrixBase<DerivedF>& F_expr,
                                                  const Eigen::MatrixBase<DerivedQ>& Q_expr,
                                                  typename DerivedF::Scalar alpha, Index k) {
  using Scalar = typename DerivedF::Scalar;
  const DenseMatrix<Scalar> F = F_expr;
  const DenseMatrix<Scalar> Q = Q_expr;
  detail::oracle_size_check<Scalar>("adi1_dense", F.rows());
  if (Q.rows() != F.rows() || Q.cols() != F.rows()) {
    throw DimensionMismatch("adi1_dense: Q must match F");
  }
  const DenseMatrix<Scalar> Ft = F.transpose();
  const ShiftedSolver<Scalar> shifted = shifted_factorize(Ft, alpha);
  DenseMatrix<Scalar> F_minus_aI = F;
  F_minus_aI.diagonal().array() -= alpha;

  DenseMatrix<Scalar> X = DenseMatrix<Scalar>::Zero(F.rows(), F.rows());
  for (Index j = 0; j < k; ++j) {
    const DenseMatrix<Scalar> half = shifted.solve(Q - X * F_minus_aI);
    const DenseMatrix<Scalar> rhs = Q - (F_minus_aI.transpose() * half);
    X = shifted.solve(rhs.transpose()).transpose();  // X (F + alpha I) = rhs
  }
  return X;
}

/// k sweeps of the dense two-parameter alternating scheme
///   (F^T + alpha I) X_{j+1/2} = Q - X_j (F - alpha I)
///   X_{j+1} (F + beta I)      = Q - (F^T - beta I) X_{j+1/2}
/// from X_0 = 0.  Collapses to adi1_dense when beta = alpha.
template <typename DerivedF, typename DerivedQ>
DenseMatrix<typename DerivedF::Scalar> adi2_dense(const Eigen::MatrixBase<DerivedF>& F_expr,
                                                  const Eigen::MatrixBase<DerivedQ>& Q_expr,
                                                  typename DerivedF::Scalar alpha,
                                                  typename DerivedF::Scalar beta, Index k) {
  using Scalar = typename DerivedF::Scalar;
  const DenseMatrix<Scalar> F = F_expr;
  const DenseMatrix<Scalar> Q = Q_expr;
  detail::oracle_size_check<Scalar>("adi2_dense", F.rows());
  if (Q.rows() != F.rows() || Q.cols() != F.rows()) {
    throw DimensionMismatch("adi2_dense: Q must match F");
  }
  const DenseMatrix<Scalar> Ft = F.transpose();
  const ShiftedSolver<Scalar> solve_a = shifted_factorize(Ft, alpha);
  const ShiftedSolver<Scalar> solve_b = shifted_factorize(Ft, beta);
  DenseMatrix<Scalar> F_minus_aI = F;
  F_minus_aI.diagonal().array() -= alpha;
  DenseMatrix<Scalar> Ft_minus_bI = Ft;
  Ft_minus_bI.diagonal().array() -= beta;

  DenseMatrix<Scalar> X = DenseMatrix<Scalar>::Zero(F.rows(), F.rows());
  for (Index j = 0; j < k; ++j) {
    const DenseMatrix<Scalar> half = solve_a.solve(Q - X * F_minus_aI);
    const DenseMatrix<Scalar> rhs = Q - Ft_minus_bI * half;
    X = solve_b.solve(rhs.transpose()).transpose();  // X (F + beta I) = rhs
  }
  return X;
}

namespace detail {

template <typename Scalar>
std::vector<DenseMatrix<Scalar>> care_newton_iterates(const CareProblem<Scalar>& p,
                                                      const DenseMatrix<Scalar>& K0) {
  p.validate();
  oracle_size_check<Scalar>("care_newton_exact", p.n());
  if (K0.rows() != p.n() || K0.cols() != p.m()) {
    throw DimensionMismatch("care_newton_exact: K0 must be n x m");
  }
  {
    const DenseMatrix<Scalar> A0 = p.B * K0.transpose() - DenseMatrix<Scalar>(p.A);
    Eigen::EigenSolver<DenseMatrix<Scalar>> eig(A0, false);
    if (!(eig.eigenvalues().real().array() > Scalar(0)).all()) {
      throw NotStabilizing("care_newton_exact: B K0^T - A has spectrum outside the right half-plane");
    }
  }

  std::vector<DenseMatrix<Scalar>> iterates;
  DenseMatrix<Scalar> K = K0;
  for (Index it = 1; it <= 30; ++it) {
    const NewtonState<Scalar> s = kn_step_operator(p, K);
    const DenseMatrix<Scalar> X =
        lyap_kron_solve(s.A_k, DenseMatrix<Scalar>(s.M_k * s.M_k.transpose()));
    iterates.push_back(X);
    K = X * p.B;
    if (care_residual(p, X) <= Scalar(1e-12)) return iterates;
  }
  throw MaxIterations("care_newton_exact: no convergence within 30 steps");
}

}  // namespace detail

/// Newton iteration with every Lyapunov step solved exactly through the
/// straightened system; stops at Riccati residual 1e-12 or 30 steps.
template <typename Scalar, typename Derived>
DenseMatrix<Scalar> care_newton_exact(const CareProblem<Scalar>& p,
                                      const Eigen::MatrixBase<Derived>& K0) {
  return detail::care_newton_iterates(p, DenseMatrix<Scalar>(K0)).back();
}

/// Full iterate sequence of care_newton_exact, for convergence-rate studies.
template <typename Scalar, typename Derived>
std::vector<DenseMatrix<Scalar>> care_newton_exact_iterates(const CareProblem<Scalar>& p,
                                                            const Eigen::MatrixBase<Derived>& K0) {
  return detail::care_newton_iterates(p, DenseMatrix<Scalar>(K0));
}

}  // namespace adi
