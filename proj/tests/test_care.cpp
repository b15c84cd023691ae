#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "adi/care.hpp"
#include "adi/lyap.hpp"
#include "adi/matcore.hpp"
#include "adi/oracle.hpp"
#include "adi/probgen.hpp"
#include "support.hpp"

using adi::CareProblem;
using adi::DenseMatrix;
using adi::Family;
using adi::Index;
using adi::LyapProblem;
using adi::SparseMatrix;
using testsupport::deterministic_matrix;
using testsupport::tridiag;

namespace {

// Stable scalar plant with no input: the Riccati equation degenerates to
// 2X = C^T C.
CareProblem<double> trivial_plant() {
  CareProblem<double> p;
  p.A = tridiag(2, 0.0, -1.0, 0.0);
  p.B = DenseMatrix<double>::Zero(2, 1);
  p.C = DenseMatrix<double>::Ones(1, 2);
  return p;
}

double max_sigma_svd(const DenseMatrix<double>& M) {
  return Eigen::JacobiSVD<DenseMatrix<double>>(M).singularValues()(0);
}

}  // namespace

TEST_SUITE("care") {

TEST_CASE("outer step operator at zero feedback") {
  const auto p = adi::generate<double>({Family::Care341, 8, 0}).as_care();
  const auto s = adi::kn_step_operator(p, DenseMatrix<double>::Zero(8, 1));
  CHECK((s.A_k + DenseMatrix<double>(p.A)).norm() == 0.0);
  CHECK(s.M_k.cols() == p.m() + p.p());
  CHECK(s.M_k.leftCols(p.m()).norm() == 0.0);
  CHECK((s.M_k.rightCols(p.p()) - p.C.transpose()).norm() == 0.0);
}

TEST_CASE("outer step operator for an explicit feedback") {
  CareProblem<double> p;
  p.A = tridiag(2, 0.0, -1.0, 0.0);
  p.B = DenseMatrix<double>::Zero(2, 1);
  p.B(0, 0) = 1.0;
  p.C = DenseMatrix<double>::Ones(1, 2);
  DenseMatrix<double> K = DenseMatrix<double>::Zero(2, 1);
  K(0, 0) = 1.0;
  const auto s = adi::kn_step_operator(p, K);
  DenseMatrix<double> expected(2, 2);
  expected << 2.0, 0.0, 0.0, 1.0;  // B K^T - A = e1 e1^T + I
  CHECK((s.A_k - expected).norm() == 0.0);
}

TEST_CASE("outer step operator stays positive-real at the solution") {
  const auto p = adi::generate<double>({Family::Care341, 8, 0}).as_care();
  const DenseMatrix<double> X = adi::care_newton_exact(p, DenseMatrix<double>::Zero(8, 1));
  const auto s = adi::kn_step_operator(p, DenseMatrix<double>(X * p.B));
  Eigen::EigenSolver<DenseMatrix<double>> eig(s.A_k, false);
  CHECK(eig.eigenvalues().real().minCoeff() > 0.0);
}

TEST_CASE("inner solve of a trivial outer step") {
  const CareProblem<double> p = trivial_plant();
  const auto state = adi::kn_step_operator(p, DenseMatrix<double>::Zero(2, 1));
  const auto f = adi::inner_rgadi(state, 1.0, 0.0);
  const DenseMatrix<double> X = adi::materialize(f);
  const DenseMatrix<double> expected = 0.5 * p.C.transpose() * p.C;
  CHECK((X - expected).norm() <= 1e-14);
}

TEST_CASE("outer step solves agree between the driver form and the standalone solvers") {
  const auto p = adi::generate<double>({Family::Care341, 16, 0}).as_care();
  const auto state = adi::kn_step_operator(p, DenseMatrix<double>::Zero(16, 1));
  const double alpha = max_sigma_svd(state.A_k);

  LyapProblem<double> lp;
  lp.F = state.A_k.sparseView();
  lp.C = state.M_k.transpose();

  adi::SolveOptions<double> opts;
  opts.alpha = alpha;
  opts.omega = 0.015;
  opts.max_iter = 6;
  opts.tol = 1e-300;
  opts.keep_iterates = true;
  const auto low_rank = adi::rgadi(lp, opts);
  const auto dense = adi::gadi_dense(lp, opts);

  REQUIRE(low_rank.iterates.size() == dense.iterates.size());
  for (std::size_t k = 0; k < dense.iterates.size(); ++k) {
    const double scale = 1.0 + dense.iterates[k].norm();
    CHECK((low_rank.iterates[k] - dense.iterates[k]).norm() <= 1e-10 * scale);
  }

  adi::SolveOptions<double> inner_opts;
  inner_opts.max_iter = 6;
  inner_opts.tol = 1e-300;
  const auto f = adi::inner_rgadi(state, alpha, 0.015, inner_opts);
  const DenseMatrix<double> X_inner = adi::materialize(f);
  const DenseMatrix<double>& X_ref = dense.iterates.back();
  CHECK((X_inner - X_ref).norm() <= 1e-12 * (1.0 + X_ref.norm()));
}

TEST_CASE("trivial plant collapses in one outer step") {
  // B = 0 makes the outer update a no-op, so only a tight fixed inner
  // tolerance lets the first outer step finish the job.
  const CareProblem<double> p = trivial_plant();
  adi::SolveOptions<double> opts;
  opts.adaptive_inner_tol = false;
  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(2, 1), opts);
  CHECK(sol.converged);
  CHECK(sol.outer_iterations == 1);
  CHECK(sol.K.rows() == 2);
  CHECK(sol.K.cols() == 1);
  CHECK(sol.K.norm() == 0.0);
  const DenseMatrix<double> expected = 0.5 * p.C.transpose() * p.C;
  CHECK((adi::materialize(sol.factors) - expected).norm() <= 1e-12);
}

TEST_CASE("benchmark feedback iteration converges within six outer steps") {
  const auto p = adi::generate<double>({Family::Care341, 128, 0}).as_care();
  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(128, 1));
  CHECK(sol.converged);
  CHECK(sol.outer_iterations <= 6);
  CHECK(sol.residual_history.back() < 1e-12);
}

TEST_CASE("driver matches the exact-solve iteration") {
  const auto p = adi::generate<double>({Family::Care341, 8, 0}).as_care();
  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(8, 1));
  const DenseMatrix<double> X = adi::materialize(sol.factors);
  const DenseMatrix<double> X_ref = adi::care_newton_exact(p, DenseMatrix<double>::Zero(8, 1));
  CHECK((X - X_ref).norm() <= 1e-9 * (1.0 + X_ref.norm()));
}

TEST_CASE("residual conventions and factored agreement") {
  const auto p = adi::generate<double>({Family::Care341, 32, 0}).as_care();
  CHECK(adi::care_residual(p, DenseMatrix<double>::Zero(32, 32)) == 1.0);

  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(32, 1));
  const DenseMatrix<double> X = adi::materialize(sol.factors);
  CHECK(adi::care_residual(p, X) <= 1e-10);
  CHECK(std::abs(adi::care_residual_factored(p, sol.factors) - adi::care_residual(p, X)) <=
        1e-10);
}

TEST_CASE("feedback change measure") {
  const DenseMatrix<double> K = deterministic_matrix(8, 1, 21);
  CHECK(adi::feedback_change(K, K) == 0.0);
  CHECK(std::abs(adi::feedback_change(DenseMatrix<double>(2.0 * K), K) - 0.5) <= 1e-15);
  CHECK_THROWS_AS(adi::feedback_change(DenseMatrix<double>::Zero(8, 1), K), adi::ZeroFeedback);
  CHECK_THROWS_AS(adi::feedback_change(K, DenseMatrix<double>::Zero(7, 1)),
                  adi::DimensionMismatch);
}

TEST_CASE("feedback history contracts after the first outer step") {
  const auto p = adi::generate<double>({Family::Care341, 16, 0}).as_care();
  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(16, 1));
  REQUIRE(sol.feedback_history.size() >= 2);
  for (std::size_t k = 1; k < sol.feedback_history.size(); ++k) {
    REQUIRE_FALSE(std::isnan(sol.feedback_history[k]));
    CHECK(sol.feedback_history[k] < sol.feedback_history[k - 1]);
  }
}

TEST_CASE("inner equation closes the Riccati residual at every outer step") {
  // With a near-exact inner solve, the outer-step equation rearranges to
  //   (Riccati residual of X_{k+1}) + (inner residual) + dK dK^T = 0
  // with dK = K_k - X_{k+1} B; all three terms are computed independently.
  const auto p = adi::generate<double>({Family::Care341, 16, 0}).as_care();
  const DenseMatrix<double> A = DenseMatrix<double>(p.A);
  const DenseMatrix<double> Q = p.C.transpose() * p.C;
  const double slack = 1e-8 * Q.norm();

  DenseMatrix<double> K = DenseMatrix<double>::Zero(16, 1);
  for (int step = 0; step < 3; ++step) {
    const auto state = adi::kn_step_operator(p, K);
    const double alpha = max_sigma_svd(state.A_k);
    adi::SolveOptions<double> opts;
    opts.tol = 1e-13;
    const auto f = adi::inner_rgadi(state, alpha, 0.015, opts);
    const DenseMatrix<double> X = adi::materialize(f);

    const DenseMatrix<double> riccati =
        A.transpose() * X + X * A - X * p.B * p.B.transpose() * X + Q;
    const DenseMatrix<double> inner =
        state.A_k.transpose() * X + X * state.A_k - state.M_k * state.M_k.transpose();
    const DenseMatrix<double> dK = state.K - X * p.B;
    CHECK((riccati + inner + dK * dK.transpose()).norm() <= slack);

    K = f.V * (f.W.transpose() * p.B);
  }
}

TEST_CASE("closed loop is stable and the iterate symmetric at benchmark sizes") {
  for (Family family : {Family::Care341, Family::Care342}) {
    const auto p = adi::generate<double>({family, 32, 0}).as_care();
    const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(32, 1));
    const DenseMatrix<double> X = adi::materialize(sol.factors);
    CHECK(adi::closed_loop_spectral_abscissa(p, X) < 0.0);
    CHECK((X - X.transpose()).norm() <= 1e-8 * X.norm());
  }
}

TEST_CASE("exact iterates decrease monotonically in the definite order") {
  for (Index n : {Index(8), Index(16)}) {
    const auto p = adi::generate<double>({Family::Care341, n, 0}).as_care();
    const auto its = adi::care_newton_exact_iterates(p, DenseMatrix<double>::Zero(n, 1));
    REQUIRE(its.size() >= 2);
    for (std::size_t k = 0; k + 1 < its.size(); ++k) {
      const DenseMatrix<double> D = its[k] - its[k + 1];
      Eigen::SelfAdjointEigenSolver<DenseMatrix<double>> eig(0.5 * (D + D.transpose()));
      CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("rejects a start that does not flip the spectrum") {
  CareProblem<double> p;
  p.A = tridiag(4, 0.0, 1.0, 0.0);  // unstable plant
  p.B = DenseMatrix<double>::Zero(4, 1);
  p.C = DenseMatrix<double>::Ones(1, 4);
  const DenseMatrix<double> K0 = DenseMatrix<double>::Zero(4, 1);
  CHECK_THROWS_AS(adi::kleinman_newton(p, K0), adi::NotStabilizing);
  CHECK_THROWS_AS(adi::care_newton_exact(p, K0), adi::NotStabilizing);
}

TEST_CASE("outer budget violation names the budget") {
  const auto p = adi::generate<double>({Family::Care341, 16, 0}).as_care();
  adi::SolveOptions<double> opts;
  opts.max_iter = 1;
  try {
    adi::kleinman_newton(p, DenseMatrix<double>::Zero(16, 1), opts);
    FAIL("expected MaxOuterIterations");
  } catch (const adi::MaxOuterIterations& e) {
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("zero cost with zero start is exact immediately") {
  CareProblem<double> p;
  p.A = tridiag(2, 0.0, -1.0, 0.0);
  p.B = DenseMatrix<double>::Ones(2, 1);
  p.C = DenseMatrix<double>::Zero(0, 2);
  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(2, 1));
  CHECK(sol.converged);
  CHECK(sol.factors.cols() == 0);
  CHECK(sol.K.norm() == 0.0);
}

TEST_CASE("feedback-change stopping criterion converges") {
  const auto p = adi::generate<double>({Family::Care341, 16, 0}).as_care();
  adi::SolveOptions<double> opts;
  opts.criterion = adi::StopCriterion::FeedbackChange;
  const auto sol = adi::kleinman_newton(p, DenseMatrix<double>::Zero(16, 1), opts);
  CHECK(sol.converged);
  CHECK(sol.residual_history.back() < 1e-8);
  CHECK(adi::closed_loop_spectral_abscissa(p, sol.factors) < 0.0);
}

TEST_CASE("stabilizability and detectability checks") {
  const auto p = adi::generate<double>({Family::Care341, 8, 0}).as_care();
  CHECK(adi::is_stabilizable(p));
  CHECK(adi::is_detectable(p));

  CareProblem<double> bad;
  bad.A = tridiag(2, 0.0, 1.0, 0.0);  // unstable and uncontrolled
  bad.B = DenseMatrix<double>::Zero(2, 1);
  bad.C = DenseMatrix<double>::Ones(1, 2);
  CHECK_FALSE(adi::is_stabilizable(bad));
}

}  // TEST_SUITE("care")
