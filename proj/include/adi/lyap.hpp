#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "adi/matcore.hpp"
#include "adi/shifted_solver.hpp"
#include "adi/types.hpp"

namespace adi {

/// Lyapunov equation F^T X + X F = Q with Q = C^T C.  F has its spectrum in
/// the open right half-plane; Q is never stored densely unless a dense code
/// path materializes it below the dense threshold.
template <typename Scalar>
struct LyapProblem {
  SparseMatrix<Scalar> F;  // n x n
  DenseMatrix<Scalar> C;   // p x n, p <= n

  Index n() const { return F.rows(); }
  Index p() const { return C.rows(); }

  void validate() const {
    if (F.rows() != F.cols()) throw DimensionMismatch("LyapProblem: F must be square");
    if (C.cols() != F.rows()) {
      throw DimensionMismatch("LyapProblem: C has " + std::to_string(C.cols()) +
                              " columns, F is " + std::to_string(F.rows()) + "-dimensional");
    }
    if (C.rows() > F.rows()) throw DimensionMismatch("LyapProblem: C has more rows than columns");
  }
};

enum class StopCriterion { RelativeResidual, FeedbackChange };

/// Shared solver knobs.  alpha defaults to the largest singular value of the
/// coefficient matrix when unset; beta only applies to the two-parameter ADI
/// scheme.  compress_tol turns on factor recompression in the doubling-width
/// scheme (the linear-width schemes never need it).  keep_iterates snapshots
/// the dense iterate each step for equivalence testing and is honored only at
/// dense-path sizes.
template <typename Scalar>
struct SolveOptions {
  std::optional<Scalar> alpha;
  std::optional<Scalar> beta;
  Scalar omega = Scalar(0.015);
  Index max_iter = 50;
  Scalar tol = Scalar(1e-12);
  StopCriterion criterion = StopCriterion::RelativeResidual;
  std::optional<Scalar> compress_tol;
  Index dense_threshold = kDenseThreshold;
  Index width_cap = 4096;
  bool keep_iterates = false;
  // Riccati-driver knobs: cap on inner sweeps per outer step, and whether the
  // inner tolerance tracks the outer residual (off = fixed at tol, for
  // near-exact inner solves in study runs).
  Index inner_sweep_cap = 16;
  bool adaptive_inner_tol = true;

  void validate() const {
    if (!(omega >= Scalar(0) && omega < Scalar(2))) {
      throw std::invalid_argument("SolveOptions: omega must lie in [0, 2)");
    }
    if (alpha && !(*alpha > Scalar(0))) {
      throw std::invalid_argument("SolveOptions: alpha must be positive");
    }
    if (beta && !(*beta > Scalar(0))) {
      throw std::invalid_argument("SolveOptions: beta must be positive");
    }
    if (!(tol > Scalar(0))) throw std::invalid_argument("SolveOptions: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolveOptions: max_iter must be at least 1");
    if (inner_sweep_cap < 1) {
      throw std::invalid_argument("SolveOptions: inner_sweep_cap must be at least 1");
    }
  }
};

template <typename Scalar>
struct LyapSolution {
  LowRankFactors<Scalar> factors;        // low-rank paths; empty on the dense path
  DenseMatrix<Scalar> X;                 // dense path; 0x0 on low-rank paths
  std::vector<Scalar> residual_history;  // one entry per iteration
  std::vector<Index> width_history;      // factor width (or n on the dense path)
  Index iterations = 0;
  bool converged = false;
  std::vector<DenseMatrix<Scalar>> iterates;  // only with keep_iterates
};

namespace detail {

// ||C^T C||_2 = sigma_max(C)^2; C is short-and-wide so the exact
// decomposition is cheap.
template <typename Scalar>
Scalar gram_norm(const DenseMatrix<Scalar>& C) {
  if (C.rows() == 0) return Scalar(0);
  const Scalar s = spectral_norm_exact(C);
  return s * s;
}

// Spectral norm of a dense matrix: exact decomposition at small sizes, power
// iteration at tolerance 1e-8 above.
template <typename Scalar>
Scalar residual_norm(const DenseMatrix<Scalar>& R) {
  if (R.rows() <= 256 && R.cols() <= 256) return spectral_norm_exact(R);
  SigmaOptions opts;
  opts.tol = 1e-8;
  return max_singular_value(R, opts);
}

// Spectral norm of U S^T without forming it: thin orthogonal reductions of
// both sides leave a small core whose norm equals the product's.
template <typename Scalar>
Scalar product_norm(const DenseMatrix<Scalar>& U, const DenseMatrix<Scalar>& S) {
  DenseMatrix<Scalar> Qu, Ru, Qs, Rs;
  thin_qr(U, Qu, Ru);
  thin_qr(S, Qs, Rs);
  const DenseMatrix<Scalar> core = Ru * Rs.transpose();
  return residual_norm(core);
}

// Relative residual ||F^T X + X F - C^T C||_2 / ||C^T C||_2 for X = V W^T,
// evaluated through the thin splitting
//   R = [F^T V, V, C^T] * [W, F^T W, -C^T]^T
// so no n x n matrix is formed.  FtTimes must apply F^T to a block.
template <typename Scalar, typename ApplyFt>
Scalar residual_factored_impl(ApplyFt&& ft_times, const DenseMatrix<Scalar>& C,
                              const LowRankFactors<Scalar>& f, Scalar qnorm) {
  const Index n = C.cols();
  const Index w = f.cols();
  const Index p = C.rows();
  if (qnorm == Scalar(0)) return Scalar(0);  // empty Q: X = 0 solves exactly
  if (w == 0) return Scalar(1);              // X = 0 has residual exactly ||Q||/||Q||

  DenseMatrix<Scalar> U(n, 2 * w + p);
  U.leftCols(w) = ft_times(f.V);
  U.middleCols(w, w) = f.V;
  U.rightCols(p) = C.transpose();

  DenseMatrix<Scalar> S(n, 2 * w + p);
  S.leftCols(w) = f.W;
  S.middleCols(w, w) = ft_times(f.W);
  S.rightCols(p) = -C.transpose();

  return product_norm(U, S) / qnorm;
}

template <typename Scalar>
DenseMatrix<Scalar> dense_lyap_residual_matrix(const DenseMatrix<Scalar>& Ft,
                                               const DenseMatrix<Scalar>& C,
                                               const DenseMatrix<Scalar>& X) {
  return Ft * X + X * Ft.transpose() - C.transpose() * C;
}

}  // namespace detail

/// Relative residual of a dense candidate solution.
template <typename Scalar, typename Derived>
Scalar lyap_residual(const LyapProblem<Scalar>& p, const Eigen::MatrixBase<Derived>& X_expr) {
  p.validate();
  if (X_expr.rows() != p.n() || X_expr.cols() != p.n()) {
    throw DimensionMismatch("lyap_residual: X must be n x n");
  }
  const DenseMatrix<Scalar> X = X_expr;
  const Scalar qnorm = detail::gram_norm(p.C);
  if (qnorm == Scalar(0)) return Scalar(0);
  if (X.norm() == Scalar(0)) return Scalar(1);
  const DenseMatrix<Scalar> Ft = DenseMatrix<Scalar>(p.F).transpose();
  return detail::residual_norm(detail::dense_lyap_residual_matrix(Ft, p.C, X)) / qnorm;
}

/// Relative residual of a factored candidate, evaluated without forming any
/// n x n matrix.  This is the path the solvers monitor and the only viable
/// evaluation at large n.
template <typename Scalar>
Scalar lyap_residual_factored(const LyapProblem<Scalar>& p, const LowRankFactors<Scalar>& f) {
  p.validate();
  if (f.rows() != p.n() && f.cols() != 0) {
    throw DimensionMismatch("lyap_residual_factored: factors must have n rows");
  }
  if (f.V.cols() != f.W.cols()) {
    throw DimensionMismatch("lyap_residual_factored: V and W widths differ");
  }
  const Scalar qnorm = detail::gram_norm(p.C);
  auto ft_times = [&](const DenseMatrix<Scalar>& M) -> DenseMatrix<Scalar> {
    return p.F.transpose() * M;
  };
  return detail::residual_factored_impl<Scalar>(ft_times, p.C, f, qnorm);
}

/// Relative residual of a factored candidate.  Below the dense threshold the
/// factors are materialized and measured densely; above it the factored-core
/// evaluation takes over.
template <typename Scalar>
Scalar lyap_residual(const LyapProblem<Scalar>& p, const LowRankFactors<Scalar>& f) {
  if (p.n() <= kDenseThreshold) {
    if (f.cols() == 0) {
      const Scalar qnorm = detail::gram_norm(p.C);
      return qnorm == Scalar(0) ? Scalar(0) : Scalar(1);
    }
    return lyap_residual(p, materialize(f));
  }
  return lyap_residual_factored(p, f);
}

/// True when every eigenvalue of F has positive real part.  Dense eigensolve;
/// refuses above the eager-check size.
template <typename Scalar>
bool has_positive_real_spectrum(const SparseMatrix<Scalar>& F) {
  if (F.rows() != F.cols()) throw DimensionMismatch("has_positive_real_spectrum: square input");
  if (F.rows() > kEagerSpectrumCheckMaxDim) {
    throw DenseThresholdExceeded("has_positive_real_spectrum: matrix too large for dense check");
  }
  Eigen::EigenSolver<DenseMatrix<Scalar>> eig(DenseMatrix<Scalar>(F), false);
  return (eig.eigenvalues().real().array() > Scalar(0)).all();
}

namespace detail {

template <typename Scalar>
void record_step(LyapSolution<Scalar>& sol, Scalar res, Index width) {
  sol.residual_history.push_back(res);
  sol.width_history.push_back(width);
  sol.iterations += 1;
}

template <typename Scalar>
LyapSolution<Scalar> empty_problem_solution(Index n) {
  LyapSolution<Scalar> sol;
  sol.factors = LowRankFactors<Scalar>::zero(n);
  sol.converged = true;  // X = 0 is exact when C is empty
  return sol;
}

template <typename Scalar>
Scalar resolve_alpha(const std::optional<Scalar>& requested, const SparseMatrix<Scalar>& F) {
  if (requested) return *requested;
  return max_singular_value(F, shift_sigma_options());
}

template <typename Scalar>
Scalar resolve_alpha(const std::optional<Scalar>& requested, const DenseMatrix<Scalar>& F) {
  if (requested) return *requested;
  return max_singular_value(F, shift_sigma_options());
}

}  // namespace detail

/// Single-parameter low-rank ADI.  V_1 = sqrt(2 alpha) (F^T + alpha I)^{-1} C^T,
/// V_k = [(F^T - alpha I)(F^T + alpha I)^{-1} V_{k-1}, V_1], X_k = V_k V_k^T.
/// Factor width grows as k * p.
template <typename Scalar>
LyapSolution<Scalar> r1_adi(const LyapProblem<Scalar>& prob, Scalar alpha,
                            const SolveOptions<Scalar>& opts = {}) {
  prob.validate();
  opts.validate();
  const Index n = prob.n();
  const Index p = prob.p();
  if (p == 0) return detail::empty_problem_solution<Scalar>(n);

  const SparseMatrix<Scalar> Ft = prob.F.transpose();
  const ShiftedSolver<Scalar> shifted = shifted_factorize(Ft, alpha);
  const Scalar qnorm = detail::gram_norm(prob.C);
  auto ft_times = [&](const DenseMatrix<Scalar>& M) -> DenseMatrix<Scalar> { return Ft * M; };

  const DenseMatrix<Scalar> V1 = std::sqrt(Scalar(2) * alpha) * shifted.solve(prob.C.transpose());

  LyapSolution<Scalar> sol;
  DenseMatrix<Scalar> V = V1;
  for (Index k = 1; k <= opts.max_iter; ++k) {
    sol.factors.V = V;
    sol.factors.W = V;
    sol.factors.block_widths.assign(std::size_t(k), p);

    const Scalar res =
        detail::residual_factored_impl<Scalar>(ft_times, prob.C, sol.factors, qnorm);
    detail::record_step(sol, res, V.cols());
    if (opts.keep_iterates && n <= opts.dense_threshold) {
      sol.iterates.push_back(materialize(sol.factors));
    }
    if (res < opts.tol) {
      sol.converged = true;
      break;
    }
    if (k == opts.max_iter) break;

    // V <- [(F^T - alpha I)(F^T + alpha I)^{-1} V, V_1]
    const DenseMatrix<Scalar> Y = shifted.solve(V);
    DenseMatrix<Scalar> grown(n, V.cols() + p);
    grown << Ft * Y - alpha * Y, V1;
    V = std::move(grown);
  }
  return sol;
}

/// Two-parameter low-rank ADI.  X_k = V_k W_k^T with
///   V_1 = sqrt(alpha + beta) (F^T + alpha I)^{-1} C^T,
///   V_k = [(F^T - beta I)(F^T + alpha I)^{-1} V_{k-1}, V_1],
///   W_1 = sqrt(alpha + beta) (F^T + beta I)^{-1} C^T,
///   W_k = [(F^T + beta I)^{-1}(F^T - alpha I) W_{k-1}, W_1].
/// Collapses exactly to the single-parameter scheme when beta = alpha.
template <typename Scalar>
LyapSolution<Scalar> r2_adi(const LyapProblem<Scalar>& prob, Scalar alpha, Scalar beta,
                            const SolveOptions<Scalar>& opts = {}) {
  prob.validate();
  opts.validate();
  const Index n = prob.n();
  const Index p = prob.p();
  if (p == 0) return detail::empty_problem_solution<Scalar>(n);

  const SparseMatrix<Scalar> Ft = prob.F.transpose();
  const ShiftedSolver<Scalar> solve_a = shifted_factorize(Ft, alpha);
  const ShiftedSolver<Scalar> solve_b = shifted_factorize(Ft, beta);
  const Scalar qnorm = detail::gram_norm(prob.C);
  auto ft_times = [&](const DenseMatrix<Scalar>& M) -> DenseMatrix<Scalar> { return Ft * M; };

  const Scalar scale = std::sqrt(alpha + beta);
  const DenseMatrix<Scalar> V1 = scale * solve_a.solve(prob.C.transpose());
  const DenseMatrix<Scalar> W1 = scale * solve_b.solve(prob.C.transpose());

  LyapSolution<Scalar> sol;
  DenseMatrix<Scalar> V = V1, W = W1;
  for (Index k = 1; k <= opts.max_iter; ++k) {
    sol.factors.V = V;
    sol.factors.W = W;
    sol.factors.block_widths.assign(std::size_t(k), p);

    const Scalar res =
        detail::residual_factored_impl<Scalar>(ft_times, prob.C, sol.factors, qnorm);
    detail::record_step(sol, res, V.cols());
    if (opts.keep_iterates && n <= opts.dense_threshold) {
      sol.iterates.push_back(materialize(sol.factors));
    }
    if (res < opts.tol) {
      sol.converged = true;
      break;
    }
    if (k == opts.max_iter) break;

    // V <- [(F^T - beta I)(F^T + alpha I)^{-1} V, V_1]
    const DenseMatrix<Scalar> Y = solve_a.solve(V);
    DenseMatrix<Scalar> vg(n, V.cols() + p);
    vg << Ft * Y - beta * Y, V1;
    // W <- [(F^T + beta I)^{-1}(F^T - alpha I) W, W_1]
    DenseMatrix<Scalar> wg(n, W.cols() + p);
    wg << solve_b.solve((Ft * W - alpha * W).eval()), W1;
    V = std::move(vg);
    W = std::move(wg);
  }
  return sol;
}

namespace detail {

template <typename Scalar>
LyapSolution<Scalar> gadi_dense_impl(const LyapProblem<Scalar>& prob, DenseMatrix<Scalar> X,
                                     const SolveOptions<Scalar>& opts) {
  const Index n = prob.n();
  const DenseMatrix<Scalar> F = DenseMatrix<Scalar>(prob.F);
  const DenseMatrix<Scalar> Ft = F.transpose();
  const Scalar alpha = resolve_alpha(opts.alpha, prob.F);
  const Scalar omega = opts.omega;
  const ShiftedSolver<Scalar> shifted = shifted_factorize(Ft, alpha);
  const DenseMatrix<Scalar> Q = prob.C.transpose() * prob.C;
  const Scalar qnorm = gram_norm(prob.C);

  DenseMatrix<Scalar> aI_minus_F = -F;
  aI_minus_F.diagonal().array() += alpha;
  DenseMatrix<Scalar> F_minus_waI = F;
  F_minus_waI.diagonal().array() -= (Scalar(1) - omega) * alpha;

  LyapSolution<Scalar> sol;
  for (Index k = 1; k <= opts.max_iter; ++k) {
    const DenseMatrix<Scalar> half = shifted.solve(X * aI_minus_F + Q);
    const DenseMatrix<Scalar> rhs = X * F_minus_waI + (Scalar(2) - omega) * alpha * half;
    X = shifted.solve(rhs.transpose()).transpose();

    const Scalar res = residual_norm(dense_lyap_residual_matrix(Ft, prob.C, X)) / qnorm;
    record_step(sol, res, n);
    if (opts.keep_iterates) sol.iterates.push_back(X);
    if (res < opts.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.X = std::move(X);
  return sol;
}

}  // namespace detail

/// Dense two-half-step iteration
///   (alpha I + F^T) X_{k+1/2} = X_k (alpha I - F) + Q,
///   X_{k+1} (alpha I + F)    = X_k (F - (1-omega) alpha I) + (2-omega) alpha X_{k+1/2}.
/// Both half-steps reuse the single factorization of alpha I + F^T, the second
/// through its transpose.  Starts from X_0 = 0.
template <typename Scalar>
LyapSolution<Scalar> gadi_dense(const LyapProblem<Scalar>& prob,
                                const SolveOptions<Scalar>& opts = {}) {
  prob.validate();
  opts.validate();
  const Index n = prob.n();
  if (n > opts.dense_threshold) {
    throw DenseThresholdExceeded("gadi_dense: n = " + std::to_string(n) +
                                 " exceeds dense_threshold = " +
                                 std::to_string(opts.dense_threshold));
  }
  if (prob.p() == 0) {
    auto sol = detail::empty_problem_solution<Scalar>(n);
    sol.X = DenseMatrix<Scalar>::Zero(n, n);
    return sol;
  }
  return detail::gadi_dense_impl<Scalar>(prob, DenseMatrix<Scalar>::Zero(n, n), opts);
}

/// Warm-started variant of gadi_dense for studying non-zero initial iterates;
/// the low-rank scheme always starts from zero, so this path exists for
/// comparison runs only.
template <typename Scalar, typename Derived>
LyapSolution<Scalar> gadi_dense(const LyapProblem<Scalar>& prob,
                                const Eigen::MatrixBase<Derived>& X0,
                                const SolveOptions<Scalar>& opts = {}) {
  prob.validate();
  opts.validate();
  const Index n = prob.n();
  if (n > opts.dense_threshold) {
    throw DenseThresholdExceeded("gadi_dense: n = " + std::to_string(n) +
                                 " exceeds dense_threshold = " +
                                 std::to_string(opts.dense_threshold));
  }
  if (X0.rows() != n || X0.cols() != n) {
    throw DimensionMismatch("gadi_dense: X0 must be n x n");
  }
  if (prob.p() == 0) {
    auto sol = detail::empty_problem_solution<Scalar>(n);
    sol.X = DenseMatrix<Scalar>::Zero(n, n);
    return sol;
  }
  return detail::gadi_dense_impl(prob, X0, opts);
}

namespace detail {

// Low-rank doubling iteration behind rgadi and the Riccati inner solver,
// generic over the (sparse or dense) transposed coefficient matrix.
//   V_1 = W_1 = sqrt((2-omega) alpha) (alpha I + F^T)^{-1} C^T
//   V_k = [V_{k-1}, sqrt((2-omega) alpha) (alpha I + F^T)^{-1} V_{k-1}, V_1]
//   W_k = [(alpha I + F^T)^{-1}(F^T - (1-omega) alpha I) W_{k-1},
//          sqrt((2-omega) alpha) (alpha I + F^T)^{-1}(alpha I - F^T) W_{k-1}, W_1]
// One factorization of alpha I + F^T serves every block.  Materializing
// V_k W_k^T reproduces the dense two-half-step iterate from X_0 = 0 exactly.
template <typename Scalar, typename MatT>
LyapSolution<Scalar> rgadi_core(const MatT& Ft, const DenseMatrix<Scalar>& C, Scalar alpha,
                                const SolveOptions<Scalar>& opts) {
  const Index n = Ft.rows();
  const Index p = C.rows();
  const Scalar omega = opts.omega;
  const ShiftedSolver<Scalar> shifted = shifted_factorize(Ft, alpha);
  const Scalar qnorm = gram_norm(C);
  const Scalar scale = std::sqrt((Scalar(2) - omega) * alpha);
  auto ft_times = [&](const DenseMatrix<Scalar>& M) -> DenseMatrix<Scalar> { return Ft * M; };

  const DenseMatrix<Scalar> V1 = scale * shifted.solve(C.transpose());

  LyapSolution<Scalar> sol;
  DenseMatrix<Scalar> V = V1, W = V1;
  std::vector<Index> blocks = {p};
  for (Index k = 1; k <= opts.max_iter; ++k) {
    sol.factors.V = V;
    sol.factors.W = W;
    sol.factors.block_widths = blocks;

    const Scalar res = residual_factored_impl<Scalar>(ft_times, C, sol.factors, qnorm);
    record_step(sol, res, V.cols());
    if (opts.keep_iterates && n <= opts.dense_threshold) {
      sol.iterates.push_back(materialize(sol.factors));
    }
    if (res < opts.tol) {
      sol.converged = true;
      break;
    }
    if (k == opts.max_iter) break;

    const Index w = V.cols();
    const Index grown_width = 2 * w + p;
    if (grown_width > opts.width_cap && !opts.compress_tol) {
      throw WidthCapExceeded("rgadi: factor width " + std::to_string(grown_width) +
                             " would exceed width_cap = " + std::to_string(opts.width_cap) +
                             " with compression off");
    }

    const DenseMatrix<Scalar> FtW = Ft * W;
    DenseMatrix<Scalar> Vg(n, grown_width), Wg(n, grown_width);
    Vg.leftCols(w) = V;
    Vg.middleCols(w, w) = scale * shifted.solve(V);
    Vg.rightCols(p) = V1;
    Wg.leftCols(w) = shifted.solve((FtW - (Scalar(1) - omega) * alpha * W).eval());
    Wg.middleCols(w, w) = scale * shifted.solve((alpha * W - FtW).eval());
    Wg.rightCols(p) = V1;
    V = std::move(Vg);
    W = std::move(Wg);
    blocks = {w, w, p};

    if (opts.compress_tol) {
      LowRankFactors<Scalar> f;
      f.V = std::move(V);
      f.W = std::move(W);
      f.block_widths = blocks;
      f = compress_factors(f, *opts.compress_tol);
      if (f.cols() > opts.width_cap) {
        throw WidthCapExceeded("rgadi: compressed width still exceeds width_cap");
      }
      V = std::move(f.V);
      W = std::move(f.W);
      blocks = f.block_widths.empty() ? std::vector<Index>{0} : f.block_widths;
    }
  }
  return sol;
}

}  // namespace detail

/// Low-rank doubling iteration for the Lyapunov equation.  Factor width grows
/// as (2^k - 1) p with compression off.
template <typename Scalar>
LyapSolution<Scalar> rgadi(const LyapProblem<Scalar>& prob, const SolveOptions<Scalar>& opts = {}) {
  prob.validate();
  opts.validate();
  if (prob.p() == 0) return detail::empty_problem_solution<Scalar>(prob.n());
  const SparseMatrix<Scalar> Ft = prob.F.transpose();
  const Scalar alpha = detail::resolve_alpha(opts.alpha, prob.F);
  return detail::rgadi_core<Scalar, SparseMatrix<Scalar>>(Ft, prob.C, alpha, opts);
}

}  // namespace adi
