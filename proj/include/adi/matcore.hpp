#pragma once

#include <cmath>
#include <algorithm>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "adi/types.hpp"
#include "adi/shifted_solver.hpp"

namespace adi {

/// Forms the dense product V * W^T.  Intended only for dimensions at or below
/// kDenseThreshold; callers above that scale must stay factored.
template <typename Scalar>
DenseMatrix<Scalar> materialize(const LowRankFactors<Scalar>& f) {
  if (f.V.cols() != f.W.cols()) {
    throw DimensionMismatch("materialize: V and W column counts differ");
  }
  return f.V * f.W.transpose();
}

struct SigmaOptions {
  double tol = 1e-10;       // relative accuracy target for the estimate
  Index max_iter = 5000;    // cap on Gram-operator applications
  bool throw_on_cap = true; // false: return the current estimate at the cap
};

/// Settings for shift selection, where a few correct digits suffice and the
/// clustered top singular values of large problems make tight tolerances
/// unreachable within a sane budget.
inline SigmaOptions shift_sigma_options() { return SigmaOptions{1e-6, 2000, false}; }

/// Estimates the largest singular value by power iteration on the Gram
/// operator M^T M with a fixed all-ones start vector.
///
/// Termination uses the geometric-decay extrapolation err ~ diff*r/(1-r) of
/// the monotone estimate sequence, so clustered spectra stop once further
/// sweeps cannot move the estimate by more than tol in relative terms.
template <typename Derived>
typename Derived::Scalar max_singular_value(const Eigen::EigenBase<Derived>& M_base,
                                            const SigmaOptions& opts = SigmaOptions{}) {
  using Scalar = typename Derived::Scalar;
  const Derived& M = M_base.derived();
  const Index n = M.cols();
  if (M.rows() == 0 || n == 0) throw DimensionMismatch("max_singular_value: empty matrix");

  DenseVector<Scalar> v = DenseVector<Scalar>::Ones(n) / std::sqrt(Scalar(n));
  Scalar sigma = 0;
  Scalar prev_sigma = -1;
  Scalar prev_diff = -1;
  bool retried_basis_start = false;
  for (Index it = 1; it <= opts.max_iter; ++it) {
    DenseVector<Scalar> w = M * v;
    sigma = w.norm();
    if (sigma == Scalar(0)) {
      // Start vector happened to lie in the null space; retry once from a
      // basis vector before concluding the matrix is zero.
      if (retried_basis_start) return 0;
      retried_basis_start = true;
      v.setZero();
      v(0) = 1;
      prev_sigma = -1;
      prev_diff = -1;
      continue;
    }
    DenseVector<Scalar> u = M.transpose() * w;
    const Scalar un = u.norm();
    if (un == Scalar(0)) return sigma;
    v = u / un;

    if (prev_sigma >= Scalar(0)) {
      const Scalar diff = std::abs(sigma - prev_sigma);
      if (diff <= Scalar(1e-15) * sigma) return sigma;  // stagnated at machine precision
      if (prev_diff > Scalar(0)) {
        const Scalar r = diff / prev_diff;
        if (r > Scalar(0) && r < Scalar(1) && diff * r / (Scalar(1) - r) <= opts.tol * sigma) {
          return sigma;
        }
      }
      prev_diff = diff;
    }
    prev_sigma = sigma;
  }
  if (opts.throw_on_cap) {
    throw NoConvergence("max_singular_value: no convergence within " +
                        std::to_string(opts.max_iter) + " iterations");
  }
  return sigma;
}

/// Spectral norm of a dense matrix via an exact small-scale decomposition;
/// used where diagnostics need full accuracy rather than an estimate.
template <typename Derived>
typename Derived::Scalar spectral_norm_exact(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() == 0 || M.cols() == 0) return Scalar(0);
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(M.derived());
  return svd.singularValues()(0);
}

namespace detail {

// Thin orthogonal reduction: A = Q R with Q having min(rows, cols) columns.
template <typename Scalar>
void thin_qr(const DenseMatrix<Scalar>& A, DenseMatrix<Scalar>& Q, DenseMatrix<Scalar>& R) {
  const Index m = A.rows(), n = A.cols();
  const Index k = std::min(m, n);
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(A);
  Q = qr.householderQ() * DenseMatrix<Scalar>::Identity(m, k);
  R = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

}  // namespace detail

/// Recompresses a factor pair to the smallest width that keeps the product
/// within tol * ||V W^T||_F in Frobenius norm.  Orthogonal reductions of V
/// and W feed a truncated decomposition of the small middle matrix, so no
/// n-by-n product is ever formed.
template <typename Scalar>
LowRankFactors<Scalar> compress_factors(const LowRankFactors<Scalar>& f, Scalar tol) {
  if (!(tol >= Scalar(0))) throw DimensionMismatch("compress_factors: tol must be nonnegative");
  if (f.V.cols() != f.W.cols()) {
    throw DimensionMismatch("compress_factors: V and W column counts differ");
  }
  if (f.cols() == 0) return f;

  DenseMatrix<Scalar> Qv, Rv, Qw, Rw;
  detail::thin_qr(f.V, Qv, Rv);
  detail::thin_qr(f.W, Qw, Rw);
  DenseMatrix<Scalar> core = Rv * Rw.transpose();
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  const Scalar total = sv.norm();
  // Smallest kept width whose dropped tail stays within tol * total.
  Index keep = sv.size();
  Scalar tail_sq = Scalar(0);
  while (keep > 0) {
    const Scalar cand = tail_sq + sv(keep - 1) * sv(keep - 1);
    if (std::sqrt(cand) > tol * total) break;
    tail_sq = cand;
    --keep;
  }

  LowRankFactors<Scalar> out;
  DenseVector<Scalar> scale = sv.head(keep).cwiseSqrt();
  out.V = Qv * (svd.matrixU().leftCols(keep) * scale.asDiagonal());
  out.W = Qw * (svd.matrixV().leftCols(keep) * scale.asDiagonal());
  if (keep > 0) out.block_widths = {keep};
  return out;
}

}  // namespace adi
