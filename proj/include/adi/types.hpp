#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

/// Core scalar-templated matrix aliases, the low-rank factor container, and
/// the error taxonomy shared by every solver in the library.
///
/// Dense storage is column-major (Eigen's default) repo-wide; sparse storage
/// is compressed-row.
namespace adi {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Largest dimension for which routines may materialize an n-by-n dense
/// intermediate (solutions, residual matrices, eigensolves).
inline constexpr Index kDenseThreshold = 4096;

/// Largest dimension for which the n^2-by-n^2 Kronecker oracles are allowed;
/// keeps the assembled operator under ~42 MB.
inline constexpr Index kOracleMaxDim = 48;

/// Largest dimension for which stability checks run a dense eigensolve
/// eagerly; above this they are trusted, not verified.
inline constexpr Index kEagerSpectrumCheckMaxDim = 1024;

/// Largest dimension for the exact-norm convergence diagnostics (dense
/// inverses plus full decompositions per call).
inline constexpr Index kDiagnosticsMaxDim = 256;

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shapes of two operands are incompatible.
struct DimensionMismatch : SolverError {
  using SolverError::SolverError;
};

/// M + alpha*I is numerically singular (pivot below 1e-14 times the matrix
/// norm).
struct SingularShift : SolverError {
  using SolverError::SolverError;
};

/// An iterative estimate failed to meet its tolerance within its cap.
struct NoConvergence : SolverError {
  using SolverError::SolverError;
};

/// A dense-only routine was called above its dimension threshold.
struct DenseThresholdExceeded : SolverError {
  using SolverError::SolverError;
};

/// Low-rank factor growth would exceed the configured column cap.
struct WidthCapExceeded : SolverError {
  using SolverError::SolverError;
};

/// The supplied feedback does not stabilize the closed loop.
struct NotStabilizing : SolverError {
  using SolverError::SolverError;
};

/// Newton outer loop hit its iteration cap before the stopping criterion.
struct MaxOuterIterations : SolverError {
  using SolverError::SolverError;
};

/// Reference Newton solver hit its iteration cap.
struct MaxIterations : SolverError {
  using SolverError::SolverError;
};

/// Feedback-change criterion is undefined for a zero feedback matrix.
struct ZeroFeedback : SolverError {
  using SolverError::SolverError;
};

/// Problem family name not recognized.
struct UnknownFamily : SolverError {
  using SolverError::SolverError;
};

/// Kronecker operator is numerically singular.
struct SingularOperator : SolverError {
  using SolverError::SolverError;
};

/// Pair of thin factors representing the n-by-n product V * W^T.
///
/// `block_widths` records the widths of the column blocks appended over the
/// factor's construction history; their sum always equals the column count.
template <typename Scalar>
struct LowRankFactors {
  DenseMatrix<Scalar> V;
  DenseMatrix<Scalar> W;
  std::vector<Index> block_widths;

  Index rows() const { return V.rows(); }
  Index cols() const { return V.cols(); }

  static LowRankFactors zero(Index n) {
    LowRankFactors f;
    f.V = DenseMatrix<Scalar>::Zero(n, 0);
    f.W = DenseMatrix<Scalar>::Zero(n, 0);
    return f;
  }
};

}  // namespace adi
