#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "adi/lyap.hpp"
#include "adi/oracle.hpp"
#include "adi/probgen.hpp"
#include "support.hpp"

using adi::CareProblem;
using adi::DenseMatrix;
using adi::DenseVector;
using adi::Family;
using adi::Index;
using adi::LyapProblem;
using adi::SparseMatrix;
using testsupport::deterministic_matrix;
using testsupport::positive_real_dense;
using testsupport::tridiag;

TEST_SUITE("oracle") {

TEST_CASE("vec and unvec round-trip over assorted shapes") {
  for (auto [r, c] : std::vector<std::pair<Index, Index>>{{3, 5}, {1, 7}, {48, 48}, {6, 1}}) {
    const DenseMatrix<double> X = deterministic_matrix(r, c, 11 + r * 100 + c);
    const DenseMatrix<double> back = adi::unvec(adi::vec(X), r, c);
    CHECK((back - X).norm() == 0.0);
  }
  CHECK_THROWS_AS(adi::unvec(DenseVector<double>::Zero(5), 2, 3), adi::DimensionMismatch);
}

TEST_CASE("kron reproduces the product straightening rule") {
  // vec(A X B) = (B^T (x) A) vec(X) on random 4x4 triples.
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const DenseMatrix<double> A = deterministic_matrix(4, 4, 10 * seed);
    const DenseMatrix<double> X = deterministic_matrix(4, 4, 10 * seed + 1);
    const DenseMatrix<double> B = deterministic_matrix(4, 4, 10 * seed + 2);
    const DenseVector<double> lhs = adi::vec(DenseMatrix<double>(A * X * B));
    const DenseVector<double> rhs = adi::kron(B.transpose(), A) * adi::vec(X);
    CHECK((lhs - rhs).norm() <= 1e-12 * lhs.norm());
  }
}

TEST_CASE("straightened solve on a diagonal pair decouples") {
  DenseMatrix<double> F = DenseMatrix<double>::Zero(2, 2);
  F(0, 0) = 2.0;
  F(1, 1) = 3.0;
  const DenseMatrix<double> X = adi::lyap_kron_solve(F, DenseMatrix<double>::Identity(2, 2));
  CHECK(std::abs(X(0, 0) - 0.25) <= 1e-14);
  CHECK(std::abs(X(1, 1) - 1.0 / 6.0) <= 1e-14);
  CHECK(std::abs(X(0, 1)) <= 1e-14);
}

TEST_CASE("straightened solve halves the right-hand side when F is identity") {
  const Index n = 6;
  DenseMatrix<double> Q = deterministic_matrix(n, n, 77);
  Q = (Q + Q.transpose()).eval();
  const DenseMatrix<double> X = adi::lyap_kron_solve(DenseMatrix<double>::Identity(n, n), Q);
  CHECK((X - 0.5 * Q).norm() <= 1e-13 * Q.norm());
}

TEST_CASE("straightened solution satisfies the tridiagonal benchmark equation") {
  const auto prob = adi::generate<double>({Family::Lyap251, 8, 0}).as_lyap();
  const DenseMatrix<double> Q = prob.C.transpose() * prob.C;
  const DenseMatrix<double> X = adi::lyap_kron_solve(prob.F, Q);
  CHECK(adi::lyap_residual(prob, X) <= 1e-11);
}

TEST_CASE("straightened solve is permutation-consistent and reports conditioning") {
  const Index n = 8;
  const DenseMatrix<double> F = positive_real_dense(n, 5);
  DenseMatrix<double> Q = deterministic_matrix(n, n, 6);
  Q = (Q + Q.transpose()).eval();

  adi::KronOperator<double> op(F);
  CHECK(op.condition_estimate() >= 1.0);
  CHECK(std::isfinite(op.condition_estimate()));

  // Permutation similarity: solving the permuted problem must permute the solution.
  Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
  P.setIdentity();
  std::vector<int> order(n);
  for (Index i = 0; i < n; ++i) order[i] = int((i * 3 + 1) % n);
  for (Index i = 0; i < n; ++i) P.indices()(i) = order[i];

  const DenseMatrix<double> X = adi::lyap_kron_solve(F, Q);
  const DenseMatrix<double> Xp =
      adi::lyap_kron_solve(DenseMatrix<double>(P * F * P.transpose()),
                           DenseMatrix<double>(P * Q * P.transpose()));
  CHECK((Xp - P * X * P.transpose()).norm() <= 1e-10 * X.norm());
}

TEST_CASE("straightened operator rejects oversize and singular inputs") {
  CHECK_THROWS_AS(adi::KronOperator<double>(DenseMatrix<double>::Identity(49, 49)),
                  adi::DenseThresholdExceeded);
  // Eigenvalues +1 and -1 pair to zero, so the straightened operator is singular.
  DenseMatrix<double> F = DenseMatrix<double>::Zero(2, 2);
  F(0, 0) = 1.0;
  F(1, 1) = -1.0;
  CHECK_THROWS_AS(adi::KronOperator<double>{F}, adi::SingularOperator);
}

TEST_CASE("one dense single-parameter sweep solves the scalar equation") {
  DenseMatrix<double> F(1, 1), Q(1, 1);
  F << 1.0;
  Q << 1.0;
  const DenseMatrix<double> X = adi::adi1_dense(F, Q, 1.0, 1);
  CHECK(std::abs(X(0, 0) - 0.5) <= 1e-15);
}

TEST_CASE("two-parameter sweeps collapse onto single-parameter sweeps at beta = alpha") {
  const Index n = 8;
  const DenseMatrix<double> F = positive_real_dense(n, 21);
  DenseMatrix<double> Q = deterministic_matrix(n, n, 22);
  Q = (Q + Q.transpose()).eval();
  for (Index k : {1, 3, 5}) {
    const DenseMatrix<double> X1 = adi::adi1_dense(F, Q, 2.5, k);
    const DenseMatrix<double> X2 = adi::adi2_dense(F, Q, 2.5, 2.5, k);
    CHECK((X1 - X2).norm() <= 1e-14 * (1.0 + X1.norm()));
  }
}

TEST_CASE("low-rank single-parameter iterates match the dense sweeps") {
  const auto gen = adi::generate<double>({Family::RandomPositiveReal, 8, 3});
  const LyapProblem<double>& prob = gen.as_lyap();
  const DenseMatrix<double> Fd(prob.F);
  const DenseMatrix<double> Q = prob.C.transpose() * prob.C;
  const double alpha = 4.0;

  adi::SolveOptions<double> opts;
  opts.max_iter = 5;
  opts.tol = 1e-300;  // run all five steps
  opts.keep_iterates = true;
  const auto sol = adi::r1_adi(prob, alpha, opts);
  REQUIRE(sol.iterates.size() == 5);
  for (Index k = 1; k <= 5; ++k) {
    const DenseMatrix<double> ref = adi::adi1_dense(Fd, Q, alpha, k);
    CHECK((sol.iterates[k - 1] - ref).norm() <= 1e-11 * (1.0 + ref.norm()));
  }
}

TEST_CASE("low-rank two-parameter iterates match the dense sweeps") {
  const auto gen = adi::generate<double>({Family::RandomPositiveReal, 8, 4});
  const LyapProblem<double>& prob = gen.as_lyap();
  const DenseMatrix<double> Fd(prob.F);
  const DenseMatrix<double> Q = prob.C.transpose() * prob.C;
  const double alpha = 5.0, beta = 2.0;

  adi::SolveOptions<double> opts;
  opts.max_iter = 5;
  opts.tol = 1e-300;
  opts.keep_iterates = true;
  const auto sol = adi::r2_adi(prob, alpha, beta, opts);
  REQUIRE(sol.iterates.size() == 5);
  for (Index k = 1; k <= 5; ++k) {
    const DenseMatrix<double> ref = adi::adi2_dense(Fd, Q, alpha, beta, k);
    CHECK((sol.iterates[k - 1] - ref).norm() <= 1e-11 * (1.0 + ref.norm()));
  }
}

TEST_CASE("exact Newton handles the vanishing-input Riccati equation in one step") {
  CareProblem<double> p;
  p.A = SparseMatrix<double>(2, 2);
  p.A.setIdentity();
  p.A *= -1.0;
  p.B = DenseMatrix<double>::Zero(2, 1);
  p.C = DenseMatrix<double>::Ones(1, 2);
  const DenseMatrix<double> X =
      adi::care_newton_exact(p, DenseMatrix<double>::Zero(2, 1));
  const DenseMatrix<double> expect = 0.5 * p.C.transpose() * p.C;
  CHECK((X - expect).norm() <= 1e-14);
}

TEST_CASE("exact Newton solves the tridiagonal benchmark and stabilizes the loop") {
  const auto prob = adi::generate<double>({Family::Care341, 8, 0}).as_care();
  const DenseMatrix<double> X =
      adi::care_newton_exact(prob, DenseMatrix<double>::Zero(8, 1));
  CHECK(adi::care_residual(prob, X) <= 1e-12);
  CHECK(adi::closed_loop_spectral_abscissa(prob, X) < 0.0);
}

TEST_CASE("exact Newton error ratios stay bounded near the solution") {
  const auto prob = adi::generate<double>({Family::Care341, 16, 0}).as_care();
  const auto iters =
      adi::care_newton_exact_iterates(prob, DenseMatrix<double>::Zero(16, 1));
  REQUIRE(iters.size() >= 3);
  const DenseMatrix<double>& X = iters.back();
  for (std::size_t k = 0; k + 1 < iters.size(); ++k) {
    const double ek = (iters[k] - X).norm();
    const double ek1 = (iters[k + 1] - X).norm();
    if (ek <= 1e-10) continue;  // at the roundoff floor the ratio is noise
    CHECK(ek1 <= 10.0 * ek * ek);
  }
}

TEST_CASE("exact Newton rejects a destabilizing start") {
  CareProblem<double> p;
  p.A = SparseMatrix<double>(4, 4);
  p.A.setIdentity();  // unstable plant: K0 = 0 gives A_0 = -A with negative spectrum
  p.B = DenseMatrix<double>::Ones(4, 1);
  p.C = DenseMatrix<double>::Ones(1, 4);
  CHECK_THROWS_AS(adi::care_newton_exact(p, DenseMatrix<double>::Zero(4, 1)),
                  adi::NotStabilizing);
}

}  // TEST_SUITE
