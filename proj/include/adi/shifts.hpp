#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "adi/lyap.hpp"
#include "adi/matcore.hpp"
#include "adi/oracle.hpp"
#include "adi/types.hpp"

namespace adi {

enum class ShiftSource { MaxSigma, GeometricEig, UserFixed };

/// Shift choice for the alternating schemes.  The minimizer of the scalar
/// contraction bound (mu^2 - 2 alpha nu + alpha^2)/(mu^2 + 2 alpha nu + alpha^2)
/// over alpha > 0 is alpha = mu, the largest singular value; nu, the smallest
/// eigenvalue real part, is reported when a dense eigensolve is affordable and
/// left empty otherwise.
template <typename Scalar>
struct ShiftSelection {
  Scalar alpha_star = Scalar(0);
  Scalar mu = Scalar(0);
  std::optional<Scalar> nu;
  ShiftSource source = ShiftSource::MaxSigma;
};

/// Convergence-rate diagnostics.  contraction_bound fills delta and eta;
/// spectral_factors fills the rho and dominant-eigenvalue fields.  Fields not
/// filled by the producing call stay NaN.
///
/// The comparative-rate cases (plain alternating scheme faster vs relaxed
/// scheme faster) are classified on the dominant eigenvalue of the one-step
/// operator.  When several eigenvalues tie for the largest modulus and their
/// classifications disagree, comparative_case_ambiguous is set: the verdict
/// then depends on which of the tied eigenvalues is taken as dominant.
template <typename Scalar>
struct ContractionDiagnostics {
  Scalar delta = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar eta = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar rho_adi = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar rho_gadi = std::numeric_limits<Scalar>::quiet_NaN();
  std::complex<Scalar> dominant_eig_adi{std::numeric_limits<Scalar>::quiet_NaN(),
                                        std::numeric_limits<Scalar>::quiet_NaN()};
  std::complex<Scalar> dominant_eig_gadi{std::numeric_limits<Scalar>::quiet_NaN(),
                                         std::numeric_limits<Scalar>::quiet_NaN()};
  bool comparative_case_ambiguous = false;
};

namespace detail {

// Comparative-rate classification of one eigenvalue of the one-step operator:
// 1 when the plain scheme's radius must not exceed the relaxed one's
// (|lambda|^2 <= Re lambda), 2 when the relaxed scheme wins for this omega
// (window 0 < omega < 4(|lambda|^2 - Re)/((1 - Re)^2 + Im^2) < 2), 0 otherwise.
template <typename Scalar>
int comparative_case(const std::complex<Scalar>& lambda, Scalar omega) {
  const Scalar mod2 = std::norm(lambda);
  const Scalar c = lambda.real();
  const Scalar d = lambda.imag();
  if (mod2 <= c) return 1;
  const Scalar window = Scalar(4) * (mod2 - c) / ((Scalar(1) - c) * (Scalar(1) - c) + d * d);
  if (window < Scalar(2) && omega > Scalar(0) && omega < window) return 2;
  return 0;
}

template <typename Scalar, typename MatLike>
ShiftSelection<Scalar> alpha_star_impl(const MatLike& F, const DenseMatrix<Scalar>& F_dense_or_empty) {
  if (F.rows() != F.cols()) throw DimensionMismatch("alpha_star: F must be square");
  SigmaOptions opts;
  opts.throw_on_cap = false;  // clustered leading singular values: best estimate suffices
  ShiftSelection<Scalar> sel;
  sel.mu = max_singular_value(F, opts);
  sel.alpha_star = sel.mu;
  sel.source = ShiftSource::MaxSigma;
  if (F.rows() <= kEagerSpectrumCheckMaxDim) {
    const DenseMatrix<Scalar> Fd =
        F_dense_or_empty.size() ? F_dense_or_empty : DenseMatrix<Scalar>(F);
    Eigen::EigenSolver<DenseMatrix<Scalar>> eig(Fd, false);
    sel.nu = eig.eigenvalues().real().minCoeff();
  }
  return sel;
}

}  // namespace detail

template <typename Scalar>
ShiftSelection<Scalar> alpha_star(const SparseMatrix<Scalar>& F) {
  return detail::alpha_star_impl<Scalar>(F, DenseMatrix<Scalar>());
}

template <typename Derived>
ShiftSelection<typename Derived::Scalar> alpha_star(const Eigen::MatrixBase<Derived>& F) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> Fd = F;
  return detail::alpha_star_impl<Scalar>(Fd, Fd);
}

/// Geometric-mean shift sqrt(lambda_max * lambda_min), defined only for
/// matrices whose spectrum is real and positive; returns nothing otherwise.
/// (For nonsymmetric F with complex eigenvalues the geometric mean has no
/// canonical real value, so this variant refuses rather than guess.)
template <typename Scalar>
std::optional<ShiftSelection<Scalar>> geometric_eig_alpha(const SparseMatrix<Scalar>& F) {
  if (F.rows() != F.cols()) throw DimensionMismatch("geometric_eig_alpha: F must be square");
  if (F.rows() > kEagerSpectrumCheckMaxDim) {
    throw DenseThresholdExceeded("geometric_eig_alpha: matrix too large for dense eigensolve");
  }
  Eigen::EigenSolver<DenseMatrix<Scalar>> eig(DenseMatrix<Scalar>(F), false);
  const auto& ev = eig.eigenvalues();
  const Scalar scale = ev.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return std::nullopt;
  if (ev.imag().cwiseAbs().maxCoeff() > Scalar(1e-10) * scale) return std::nullopt;
  const Scalar lo = ev.real().minCoeff();
  const Scalar hi = ev.real().maxCoeff();
  if (!(lo > Scalar(0))) return std::nullopt;
  ShiftSelection<Scalar> sel;
  sel.alpha_star = std::sqrt(lo * hi);
  sel.mu = hi;
  sel.nu = lo;
  sel.source = ShiftSource::GeometricEig;
  return sel;
}

/// The two scalars of the one-step error bound
///   ||X_{k+1} - X|| <= delta(alpha) ||X_k - X|| + eta(alpha, omega) ||R(X_k)||:
///   delta = ||F (aI+F)^{-1}|| + alpha ||(aI+F^T)^{-1}|| ||(aI-F)(aI+F)^{-1}||,
///   eta   = |1-omega| alpha ||(aI+F^T)^{-1}|| ||(aI+F)^{-1}||.
/// Exact spectral norms via dense decompositions; desk scale only.
template <typename Derived>
ContractionDiagnostics<typename Derived::Scalar> contraction_bound(
    const Eigen::MatrixBase<Derived>& F_expr, typename Derived::Scalar alpha,
    typename Derived::Scalar omega) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> F = F_expr;
  if (F.rows() != F.cols()) throw DimensionMismatch("contraction_bound: F must be square");
  if (F.rows() > kDiagnosticsMaxDim) {
    throw DenseThresholdExceeded("contraction_bound: n exceeds the diagnostics cap " +
                                 std::to_string(kDiagnosticsMaxDim));
  }
  const Index n = F.rows();
  const ShiftedSolver<Scalar> shifted = shifted_factorize(DenseMatrix<Scalar>(F.transpose()), alpha);
  // (alpha I + F)^{-1} = solve_{F^T + alpha I}(I)^T
  const DenseMatrix<Scalar> Ainv =
      shifted.solve(DenseMatrix<Scalar>::Identity(n, n)).transpose();
  DenseMatrix<Scalar> aI_minus_F = -F;
  aI_minus_F.diagonal().array() += alpha;

  const Scalar inv_norm = spectral_norm_exact(Ainv);  // = ||(aI+F^T)^{-1}|| as well
  ContractionDiagnostics<Scalar> d;
  d.delta = spectral_norm_exact(DenseMatrix<Scalar>(F * Ainv)) +
            alpha * inv_norm * spectral_norm_exact(DenseMatrix<Scalar>(aI_minus_F * Ainv));
  d.eta = std::abs(Scalar(1) - omega) * alpha * inv_norm * inv_norm;
  return d;
}

template <typename Scalar>
ContractionDiagnostics<Scalar> contraction_bound(const SparseMatrix<Scalar>& F, Scalar alpha,
                                                 Scalar omega) {
  return contraction_bound(DenseMatrix<Scalar>(F), alpha, omega);
}

/// Spectral radius of the straightened one-step iteration matrix
///   T(alpha) = (aI + F^T (x) I)^{-1} (aI + I (x) F^T)^{-1}
///              (aI - I (x) F^T) (aI - F^T (x) I)
/// and of its relaxed form, whose eigenvalues are the affine images
///   lambda(T(alpha, omega)) = ((2 - omega) lambda(T(alpha)) + omega) / 2.
/// Also reports the dominant eigenvalue of each, for the comparative-rate
/// case analysis.  Builds n^2 x n^2 operators; oracle scale only.
template <typename Derived>
ContractionDiagnostics<typename Derived::Scalar> spectral_factors(
    const Eigen::MatrixBase<Derived>& F_expr, typename Derived::Scalar alpha,
    typename Derived::Scalar omega) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> F = F_expr;
  if (F.rows() != F.cols()) throw DimensionMismatch("spectral_factors: F must be square");
  if (F.rows() > kOracleMaxDim) {
    throw DenseThresholdExceeded("spectral_factors: n exceeds the oracle cap " +
                                 std::to_string(kOracleMaxDim));
  }
  const Index n = F.rows();
  const Index N = n * n;
  const DenseMatrix<Scalar> Ft = F.transpose();
  const DenseMatrix<Scalar> I_n = DenseMatrix<Scalar>::Identity(n, n);
  const DenseMatrix<Scalar> A1 = kron(Ft, I_n);  // F^T (x) I
  const DenseMatrix<Scalar> A2 = kron(I_n, Ft);  // I (x) F^T

  DenseMatrix<Scalar> plus1 = A1, plus2 = A2, minus1 = -A1, minus2 = -A2;
  plus1.diagonal().array() += alpha;
  plus2.diagonal().array() += alpha;
  minus1.diagonal().array() += alpha;
  minus2.diagonal().array() += alpha;

  const DenseMatrix<Scalar> T =
      plus1.partialPivLu().solve(plus2.partialPivLu().solve(minus2 * minus1));

  Eigen::EigenSolver<DenseMatrix<Scalar>> eig(T, false);
  ContractionDiagnostics<Scalar> d;
  d.rho_adi = Scalar(0);
  d.rho_gadi = Scalar(0);
  for (Index i = 0; i < N; ++i) {
    const std::complex<Scalar> lam = eig.eigenvalues()(i);
    const std::complex<Scalar> relaxed = ((Scalar(2) - omega) * lam + omega) / Scalar(2);
    if (std::abs(lam) >= d.rho_adi) {
      d.rho_adi = std::abs(lam);
      d.dominant_eig_adi = lam;
    }
    if (std::abs(relaxed) >= d.rho_gadi) {
      d.rho_gadi = std::abs(relaxed);
      d.dominant_eig_gadi = relaxed;
    }
  }
  // Modulus ties among dominant eigenvalues can carry conflicting
  // comparative-rate classifications; surface that instead of guessing.
  const Scalar tie_tol = d.rho_adi * Scalar(1e-12);
  int seen_case = -1;
  for (Index i = 0; i < N; ++i) {
    const std::complex<Scalar> lam = eig.eigenvalues()(i);
    if (std::abs(lam) < d.rho_adi - tie_tol) continue;
    const int c = detail::comparative_case(lam, omega);
    if (seen_case == -1) seen_case = c;
    else if (c != seen_case) d.comparative_case_ambiguous = true;
  }
  return d;
}

template <typename Scalar>
ContractionDiagnostics<Scalar> spectral_factors(const SparseMatrix<Scalar>& F, Scalar alpha,
                                                Scalar omega) {
  return spectral_factors(DenseMatrix<Scalar>(F), alpha, omega);
}

template <typename Scalar>
struct OmegaScanResult {
  Scalar omega_best = Scalar(0);
  std::vector<std::pair<Scalar, Scalar>> table;  // (omega, final residual), input order
};

/// Runs the low-rank doubling solver once per candidate omega with an
/// identical iteration budget and no early stopping, and reports the
/// candidate with the smallest final residual (ties -> smallest omega).
template <typename Scalar>
OmegaScanResult<Scalar> omega_scan(const LyapProblem<Scalar>& prob,
                                   const std::vector<Scalar>& omegas, Scalar alpha,
                                   Index budget = 8) {
  prob.validate();
  if (omegas.empty()) throw std::invalid_argument("omega_scan: empty candidate list");
  if (budget < 1) throw std::invalid_argument("omega_scan: budget must be at least 1");
  for (const Scalar w : omegas) {
    if (!(w >= Scalar(0) && w < Scalar(2))) {
      throw std::invalid_argument("omega_scan: omega candidates must lie in [0, 2)");
    }
  }

  OmegaScanResult<Scalar> result;
  bool have_best = false;
  Scalar best_res = std::numeric_limits<Scalar>::infinity();
  for (const Scalar w : omegas) {
    Scalar res;
    if (prob.p() == 0) {
      res = Scalar(0);  // X = 0 is exact; nothing to iterate
    } else {
      SolveOptions<Scalar> opts;
      opts.alpha = alpha;
      opts.omega = w;
      opts.max_iter = budget;
      opts.tol = std::numeric_limits<Scalar>::min();  // run the full budget
      const LyapSolution<Scalar> sol = rgadi(prob, opts);
      res = sol.residual_history.back();
    }
    result.table.emplace_back(w, res);
    if (!have_best || res < best_res || (res == best_res && w < result.omega_best)) {
      have_best = true;
      best_res = res;
      result.omega_best = w;
    }
  }
  return result;
}

}  // namespace adi
