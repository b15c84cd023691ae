#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "adi/probgen.hpp"

using adi::DenseMatrix;
using adi::Family;
using adi::Index;

TEST_SUITE("probgen") {

TEST_CASE("first tridiagonal family prints digit for digit") {
  const auto g = adi::generate<double>({Family::Lyap251, 3, 0});
  REQUIRE(g.is_lyap());
  const auto& p = g.as_lyap();
  DenseMatrix<double> expected(3, 3);
  expected << 5.0, 0.3, 0.0, 0.2, 5.0, 0.3, 0.0, 0.2, 5.0;
  CHECK((DenseMatrix<double>(p.F) - expected).norm() == 0.0);
  CHECK((p.C - DenseMatrix<double>::Ones(1, 3)).norm() == 0.0);
}

TEST_CASE("second tridiagonal family prints digit for digit") {
  const auto p = adi::generate<double>({Family::Lyap252, 3, 0}).as_lyap();
  DenseMatrix<double> expected(3, 3);
  expected << 9.0, 3.0, 0.0, -2.0, 9.0, 3.0, 0.0, -2.0, 9.0;
  CHECK((DenseMatrix<double>(p.F) - expected).norm() == 0.0);
}

TEST_CASE("first feedback family prints digit for digit") {
  const auto g = adi::generate<double>({Family::Care341, 2, 0});
  REQUIRE(g.is_care());
  const auto& p = g.as_care();
  DenseMatrix<double> expected(2, 2);
  expected << -12.0, -3.0, 2.0, -12.0;
  CHECK((DenseMatrix<double>(p.A) - expected).norm() == 0.0);
  CHECK((p.B - 0.2 * DenseMatrix<double>::Ones(2, 1)).norm() == 0.0);
  CHECK((p.C - 0.1 * DenseMatrix<double>::Ones(1, 2)).norm() == 0.0);
}

TEST_CASE("pentadiagonal feedback family fills its five bands") {
  const auto p = adi::generate<double>({Family::Care342, 7, 0}).as_care();
  const DenseMatrix<double> A(p.A);
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 7; ++j) {
      double expected = 0.0;
      switch (int(j - i)) {
        case -2: expected = 1.0; break;
        case -1: expected = 2.0; break;
        case 0: expected = -12.0; break;
        case 1: expected = -3.0; break;
        case 2: expected = -2.0; break;
        default: break;
      }
      CHECK(A(i, j) == expected);
    }
  }
}

TEST_CASE("generation is deterministic across calls") {
  for (Family family : {Family::Lyap251, Family::Lyap252, Family::Care341, Family::Care342,
                        Family::RandomPositiveReal}) {
    const adi::ProblemSpec spec{family, 8, 3};
    const auto a = adi::generate<double>(spec);
    const auto b = adi::generate<double>(spec);
    if (a.is_lyap()) {
      CHECK((DenseMatrix<double>(a.as_lyap().F) - DenseMatrix<double>(b.as_lyap().F)).norm() ==
            0.0);
      CHECK((a.as_lyap().C - b.as_lyap().C).norm() == 0.0);
    } else {
      CHECK((DenseMatrix<double>(a.as_care().A) - DenseMatrix<double>(b.as_care().A)).norm() ==
            0.0);
      CHECK((a.as_care().B - b.as_care().B).norm() == 0.0);
      CHECK((a.as_care().C - b.as_care().C).norm() == 0.0);
    }
  }
}

TEST_CASE("random family lands in the open right half-plane") {
  for (std::uint64_t seed : {0u, 1u, 2u, 5u}) {
    const auto p = adi::generate<double>({Family::RandomPositiveReal, 8, seed}).as_lyap();
    Eigen::EigenSolver<DenseMatrix<double>> eig(DenseMatrix<double>(p.F), false);
    CHECK(eig.eigenvalues().real().minCoeff() > 0.0);
    CHECK(p.p() == Index(1 + seed % 2));
  }
  const auto p0 = adi::generate<double>({Family::RandomPositiveReal, 8, 0}).as_lyap();
  const auto p1 = adi::generate<double>({Family::RandomPositiveReal, 8, 1}).as_lyap();
  CHECK((DenseMatrix<double>(p0.F) - DenseMatrix<double>(p1.F)).norm() > 0.0);
}

TEST_CASE("feedback plants are stable at both desk and benchmark sizes") {
  for (Family family : {Family::Care341, Family::Care342}) {
    for (Index n : {Index(8), Index(48)}) {
      const auto p = adi::generate<double>({family, n, 0}).as_care();
      Eigen::EigenSolver<DenseMatrix<double>> eig(DenseMatrix<double>(p.A), false);
      CHECK(eig.eigenvalues().real().maxCoeff() < 0.0);
    }
  }
}

TEST_CASE("size and kind validation") {
  CHECK_THROWS_AS(adi::generate<double>({Family::Lyap251, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(adi::generate<double>({static_cast<Family>(99), 4, 0}), adi::UnknownFamily);

  const auto lyap = adi::generate<double>({Family::Lyap251, 4, 0});
  CHECK(lyap.is_lyap());
  CHECK_FALSE(lyap.is_care());
  CHECK_THROWS_AS(lyap.as_care(), std::logic_error);

  const auto care = adi::generate<double>({Family::Care341, 4, 0});
  CHECK(care.is_care());
  CHECK_FALSE(care.is_lyap());
  CHECK_THROWS_AS(care.as_lyap(), std::logic_error);
}

}  // TEST_SUITE("probgen")
