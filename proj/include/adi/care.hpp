#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "adi/lyap.hpp"
#include "adi/matcore.hpp"
#include "adi/types.hpp"

namespace adi {

/// Riccati equation A^T X + X A - X G X + Q = 0 with G = B B^T and Q = C^T C.
/// (A, B) stabilizable and (C, A) detectable are assumed; desk-scale checks
/// are available on demand but never run implicitly.
template <typename Scalar>
struct CareProblem {
  SparseMatrix<Scalar> A;  // n x n
  DenseMatrix<Scalar> B;   // n x m
  DenseMatrix<Scalar> C;   // p x n

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }

  void validate() const {
    if (A.rows() != A.cols()) throw DimensionMismatch("CareProblem: A must be square");
    if (B.rows() != A.rows()) throw DimensionMismatch("CareProblem: B must have n rows");
    if (C.cols() != A.rows()) throw DimensionMismatch("CareProblem: C must have n columns");
  }
};

/// One outer Newton step expressed as a Lyapunov equation
/// A_k^T X + X A_k = M_k M_k^T with A_k = B K^T - A and M_k = [K, C^T].
template <typename Scalar>
struct NewtonState {
  DenseMatrix<Scalar> K;    // n x m feedback factor, K = X B at the fixed point
  DenseMatrix<Scalar> A_k;  // B K^T - A, dense
  DenseMatrix<Scalar> M_k;  // n x (m + p)
  Index outer_index = 0;
};

template <typename Scalar>
struct CareSolution {
  LowRankFactors<Scalar> factors;  // X ~ V W^T
  DenseMatrix<Scalar> K;
  Index outer_iterations = 0;
  std::vector<Index> inner_iterations;   // sweeps per outer step
  std::vector<Scalar> residual_history;  // relative Riccati residual per outer step
  std::vector<Scalar> feedback_history;  // relative feedback change per outer step (NaN when undefined)
  std::vector<Index> width_history;      // factor width per outer step
  bool converged = false;
};

template <typename Scalar, typename Derived>
NewtonState<Scalar> kn_step_operator(const CareProblem<Scalar>& p,
                                     const Eigen::MatrixBase<Derived>& K_expr) {
  p.validate();
  if (K_expr.rows() != p.n() || K_expr.cols() != p.m()) {
    throw DimensionMismatch("kn_step_operator: K must be n x m");
  }
  const DenseMatrix<Scalar> K = K_expr;
  NewtonState<Scalar> s;
  s.K = K;
  s.A_k = p.B * K.transpose() - DenseMatrix<Scalar>(p.A);
  s.M_k.resize(p.n(), p.m() + p.p());
  s.M_k << K, p.C.transpose();
  return s;
}

/// Low-rank inner solve of the outer step's Lyapunov equation, from the zero
/// matrix, sharing one factorization of alpha_k I + A_k^T across all blocks.
template <typename Scalar>
LowRankFactors<Scalar> inner_rgadi(const NewtonState<Scalar>& state, Scalar alpha_k,
                                   Scalar omega_k, const SolveOptions<Scalar>& opts = {}) {
  if (!(alpha_k > Scalar(0))) throw std::invalid_argument("inner_rgadi: alpha_k must be positive");
  SolveOptions<Scalar> inner = opts;
  inner.omega = omega_k;
  inner.validate();
  const DenseMatrix<Scalar> At = state.A_k.transpose();
  const DenseMatrix<Scalar> Ci = state.M_k.transpose();
  return detail::rgadi_core<Scalar, DenseMatrix<Scalar>>(At, Ci, alpha_k, inner).factors;
}

namespace detail {

template <typename Scalar>
DenseMatrix<Scalar> dense_care_residual_matrix(const CareProblem<Scalar>& p,
                                               const DenseMatrix<Scalar>& X) {
  const DenseMatrix<Scalar> At = DenseMatrix<Scalar>(p.A).transpose();
  const DenseMatrix<Scalar> XB = X * p.B;
  return At * X + X * At.transpose() - XB * XB.transpose() + p.C.transpose() * p.C;
}

}  // namespace detail

/// Relative Riccati residual of a dense candidate.
template <typename Scalar, typename Derived>
Scalar care_residual(const CareProblem<Scalar>& p, const Eigen::MatrixBase<Derived>& X_expr) {
  p.validate();
  if (X_expr.rows() != p.n() || X_expr.cols() != p.n()) {
    throw DimensionMismatch("care_residual: X must be n x n");
  }
  const DenseMatrix<Scalar> X = X_expr;
  const Scalar qnorm = detail::gram_norm(p.C);
  if (qnorm == Scalar(0)) return Scalar(0);
  if (X.norm() == Scalar(0)) return Scalar(1);
  return detail::residual_norm(detail::dense_care_residual_matrix(p, X)) / qnorm;
}

/// Relative Riccati residual of a factored candidate X = V W^T without any
/// n x n product: the quadratic term X G X = [V (W^T B)] [W (V^T B)]^T stays
/// low-rank, so the residual splits as
///   [A^T V, V, V(W^T B), C^T] * [W, A^T W, -W(V^T B), C^T]^T.
template <typename Scalar>
Scalar care_residual_factored(const CareProblem<Scalar>& p, const LowRankFactors<Scalar>& f) {
  p.validate();
  if (f.rows() != p.n() && f.cols() != 0) {
    throw DimensionMismatch("care_residual_factored: factors must have n rows");
  }
  if (f.V.cols() != f.W.cols()) {
    throw DimensionMismatch("care_residual_factored: V and W widths differ");
  }
  const Scalar qnorm = detail::gram_norm(p.C);
  if (qnorm == Scalar(0)) return Scalar(0);
  const Index w = f.cols();
  if (w == 0) return Scalar(1);

  const Index n = p.n();
  const Index pp = p.p();
  const DenseMatrix<Scalar> AtV = p.A.transpose() * f.V;
  const DenseMatrix<Scalar> AtW = p.A.transpose() * f.W;
  const DenseMatrix<Scalar> Kt = f.V * (f.W.transpose() * p.B);  // X B
  const DenseMatrix<Scalar> Kh = f.W * (f.V.transpose() * p.B);  // X^T B

  DenseMatrix<Scalar> U(n, 2 * w + p.m() + pp);
  U << AtV, f.V, Kt, p.C.transpose();
  DenseMatrix<Scalar> S(n, 2 * w + p.m() + pp);
  S << f.W, AtW, -Kh, p.C.transpose();
  return detail::product_norm(U, S) / qnorm;
}

/// Relative Riccati residual of a factored candidate; dense evaluation below
/// the dense threshold, factored-core evaluation above.
template <typename Scalar>
Scalar care_residual(const CareProblem<Scalar>& p, const LowRankFactors<Scalar>& f) {
  if (p.n() <= kDenseThreshold) {
    if (f.cols() == 0) {
      const Scalar qnorm = detail::gram_norm(p.C);
      return qnorm == Scalar(0) ? Scalar(0) : Scalar(1);
    }
    return care_residual(p, materialize(f));
  }
  return care_residual_factored(p, f);
}

/// Relative feedback change ||K_next - K_prev||_2 / ||K_next||_2.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar feedback_change(const Eigen::MatrixBase<DerivedA>& K_next,
                                          const Eigen::MatrixBase<DerivedB>& K_prev) {
  using Scalar = typename DerivedA::Scalar;
  if (K_next.rows() != K_prev.rows() || K_next.cols() != K_prev.cols()) {
    throw DimensionMismatch("feedback_change: shapes differ");
  }
  const Scalar denom = spectral_norm_exact(K_next);
  if (denom == Scalar(0)) {
    throw ZeroFeedback("feedback_change: K_next is zero, criterion undefined");
  }
  return spectral_norm_exact(K_next.derived() - K_prev.derived()) / denom;
}

/// Largest real part among the eigenvalues of the closed loop A - B B^T X.
/// Negative means the feedback stabilizes the plant.  Dense eigensolve.
template <typename Scalar, typename Derived>
Scalar closed_loop_spectral_abscissa(const CareProblem<Scalar>& p,
                                     const Eigen::MatrixBase<Derived>& X) {
  p.validate();
  if (p.n() > kEagerSpectrumCheckMaxDim) {
    throw DenseThresholdExceeded("closed_loop_spectral_abscissa: matrix too large");
  }
  const DenseMatrix<Scalar> closed =
      DenseMatrix<Scalar>(p.A) - p.B * (p.B.transpose() * X.derived());
  Eigen::EigenSolver<DenseMatrix<Scalar>> eig(closed, false);
  return eig.eigenvalues().real().maxCoeff();
}

template <typename Scalar>
Scalar closed_loop_spectral_abscissa(const CareProblem<Scalar>& p, const LowRankFactors<Scalar>& f) {
  return closed_loop_spectral_abscissa(p, materialize(f));
}

/// Hautus test: every eigenvalue of A with nonnegative real part must keep
/// [lambda I - A, B] at full row rank.  Desk scale only.
template <typename Scalar>
bool is_stabilizable(const CareProblem<Scalar>& p) {
  p.validate();
  const Index n = p.n();
  if (n > kOracleMaxDim) throw DenseThresholdExceeded("is_stabilizable: desk scale only");
  using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  const DenseMatrix<Scalar> A = DenseMatrix<Scalar>(p.A);
  Eigen::EigenSolver<DenseMatrix<Scalar>> eig(A, false);
  for (Index i = 0; i < n; ++i) {
    const std::complex<Scalar> lambda = eig.eigenvalues()(i);
    if (lambda.real() < Scalar(0)) continue;
    ComplexMatrix pencil(n, n + p.m());
    pencil << lambda * ComplexMatrix::Identity(n, n) - A.template cast<std::complex<Scalar>>(),
        p.B.template cast<std::complex<Scalar>>();
    if (pencil.colPivHouseholderQr().rank() < n) return false;
  }
  return true;
}

/// Detectability of (C, A) is stabilizability of (A^T, C^T).
template <typename Scalar>
bool is_detectable(const CareProblem<Scalar>& p) {
  CareProblem<Scalar> dual;
  dual.A = SparseMatrix<Scalar>(p.A.transpose());
  dual.B = p.C.transpose();
  dual.C = p.B.transpose();
  return is_stabilizable(dual);
}

/// Newton outer iteration: each step rewrites the Riccati equation as the
/// Lyapunov equation of kn_step_operator and solves it from zero with the
/// low-rank doubling scheme.  The feedback update K = V (W^T B) is computed
/// right-to-left so no n x n product forms.  The inner tolerance follows the
/// outer residual quadratically (capped sweeps), which preserves the outer
/// Newton contraction; a fixed inner tolerance is available for study runs.
template <typename Scalar, typename Derived>
CareSolution<Scalar> kleinman_newton(const CareProblem<Scalar>& p,
                                     const Eigen::MatrixBase<Derived>& K0_expr,
                                     const SolveOptions<Scalar>& opts = {}) {
  p.validate();
  opts.validate();
  const Index n = p.n();
  if (K0_expr.rows() != n || K0_expr.cols() != p.m()) {
    throw DimensionMismatch("kleinman_newton: K0 must be n x m");
  }
  const DenseMatrix<Scalar> K0 = K0_expr;

  CareSolution<Scalar> sol;
  if (p.p() == 0 && K0.norm() == Scalar(0)) {
    sol.factors = LowRankFactors<Scalar>::zero(n);
    sol.K = DenseMatrix<Scalar>::Zero(n, p.m());
    sol.converged = true;  // Q = 0 and K0 = 0: X = 0 is exact
    return sol;
  }

  if (n <= kEagerSpectrumCheckMaxDim) {
    const DenseMatrix<Scalar> A0 = p.B * K0.transpose() - DenseMatrix<Scalar>(p.A);
    Eigen::EigenSolver<DenseMatrix<Scalar>> eig(A0, false);
    if (!(eig.eigenvalues().real().array() > Scalar(0)).all()) {
      throw NotStabilizing("kleinman_newton: B K0^T - A has spectrum outside the right half-plane");
    }
  }

  DenseMatrix<Scalar> K = K0;
  Scalar outer_res = Scalar(1);  // residual of X_0 = 0
  for (Index k = 1; k <= opts.max_iter; ++k) {
    NewtonState<Scalar> state = kn_step_operator(p, K);
    state.outer_index = k;

    const Scalar alpha_k =
        opts.alpha ? *opts.alpha : max_singular_value(state.A_k, shift_sigma_options());

    SolveOptions<Scalar> inner = opts;
    inner.alpha = alpha_k;
    inner.max_iter = opts.inner_sweep_cap;
    inner.keep_iterates = false;
    inner.criterion = StopCriterion::RelativeResidual;
    inner.tol = opts.adaptive_inner_tol
                    ? std::max(opts.tol, Scalar(0.1) * outer_res * std::min(Scalar(1), outer_res))
                    : opts.tol;

    LyapSolution<Scalar> inner_sol = detail::rgadi_core<Scalar, DenseMatrix<Scalar>>(
        state.A_k.transpose(), state.M_k.transpose(), alpha_k, inner);

    sol.factors = std::move(inner_sol.factors);
    sol.inner_iterations.push_back(inner_sol.iterations);
    sol.width_history.push_back(sol.factors.cols());

    DenseMatrix<Scalar> K_next = sol.factors.V * (sol.factors.W.transpose() * p.B);
    outer_res = care_residual_factored(p, sol.factors);
    sol.residual_history.push_back(outer_res);

    Scalar fb = std::numeric_limits<Scalar>::quiet_NaN();
    try {
      fb = feedback_change(K_next, K);
    } catch (const ZeroFeedback&) {
      // K_next = 0: leave the entry undefined and decide on the residual
    }
    sol.feedback_history.push_back(fb);

    K = std::move(K_next);
    sol.outer_iterations = k;

    const bool use_feedback = opts.criterion == StopCriterion::FeedbackChange && !std::isnan(fb);
    const Scalar crit = use_feedback ? fb : outer_res;
    if (crit < opts.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.K = std::move(K);
  if (!sol.converged) {
    throw MaxOuterIterations("kleinman_newton: no convergence within " +
                             std::to_string(opts.max_iter) + " outer steps (last residual " +
                             std::to_string(sol.residual_history.back()) + ")");
  }
  return sol;
}

}  // namespace adi
