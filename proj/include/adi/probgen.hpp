#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adi/care.hpp"
#include "adi/lyap.hpp"
#include "adi/types.hpp"

namespace adi {

/// Benchmark families.  The first four are fixed band stencils; the fifth
/// draws a strictly diagonally dominant matrix with positive diagonal, whose
/// spectrum therefore sits in the open right half-plane.
enum class Family { Lyap251, Lyap252, Care341, Care342, RandomPositiveReal };

struct ProblemSpec {
  Family family = Family::Lyap251;
  Index n = 2;
  std::uint64_t seed = 0;  // random family only

  void validate() const {
    if (n < 2) throw std::invalid_argument("ProblemSpec: n must be at least 2");
  }
};

/// Result of generate(): exactly one of the two problem kinds is present.
template <typename Scalar>
struct GeneratedProblem {
  Family family = Family::Lyap251;
  std::optional<LyapProblem<Scalar>> lyap;
  std::optional<CareProblem<Scalar>> care;

  bool is_lyap() const { return lyap.has_value(); }
  bool is_care() const { return care.has_value(); }

  const LyapProblem<Scalar>& as_lyap() const {
    if (!lyap) throw std::logic_error("GeneratedProblem: not a Lyapunov problem");
    return *lyap;
  }
  const CareProblem<Scalar>& as_care() const {
    if (!care) throw std::logic_error("GeneratedProblem: not a Riccati problem");
    return *care;
  }
};

namespace detail {

template <typename Scalar>
SparseMatrix<Scalar> banded(Index n, std::initializer_list<std::pair<int, Scalar>> bands) {
  SparseMatrix<Scalar> M(n, n);
  M.reserve(Eigen::VectorXi::Constant(int(n), int(bands.size())));
  for (Index i = 0; i < n; ++i) {
    for (const auto& [offset, value] : bands) {
      const Index j = i + offset;
      if (j >= 0 && j < n) M.insert(i, j) = value;
    }
  }
  M.makeCompressed();
  return M;
}

// Uniform double in [0, 1) with an explicit bit mapping, so every platform
// draws the identical sequence.
inline double unit_draw(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1p-53; }

}  // namespace detail

/// Deterministic problem generator.  Band values follow the printed examples
/// digit for digit; the random family is reproducible from the seed alone.
template <typename Scalar>
GeneratedProblem<Scalar> generate(const ProblemSpec& spec) {
  spec.validate();
  const Index n = spec.n;
  GeneratedProblem<Scalar> out;
  out.family = spec.family;

  switch (spec.family) {
    case Family::Lyap251: {
      LyapProblem<Scalar> p;
      p.F = detail::banded<Scalar>(n, {{-1, Scalar(0.2)}, {0, Scalar(5)}, {1, Scalar(0.3)}});
      p.C = DenseMatrix<Scalar>::Ones(1, n);
      out.lyap = std::move(p);
      return out;
    }
    case Family::Lyap252: {
      LyapProblem<Scalar> p;
      p.F = detail::banded<Scalar>(n, {{-1, Scalar(-2)}, {0, Scalar(9)}, {1, Scalar(3)}});
      p.C = DenseMatrix<Scalar>::Ones(1, n);
      out.lyap = std::move(p);
      return out;
    }
    case Family::Care341: {
      CareProblem<Scalar> p;
      p.A = detail::banded<Scalar>(n, {{-1, Scalar(2)}, {0, Scalar(-12)}, {1, Scalar(-3)}});
      p.B = Scalar(0.2) * DenseMatrix<Scalar>::Ones(n, 1);
      p.C = Scalar(0.1) * DenseMatrix<Scalar>::Ones(1, n);
      out.care = std::move(p);
      return out;
    }
    case Family::Care342: {
      CareProblem<Scalar> p;
      p.A = detail::banded<Scalar>(n, {{-2, Scalar(1)},
                                       {-1, Scalar(2)},
                                       {0, Scalar(-12)},
                                       {1, Scalar(-3)},
                                       {2, Scalar(-2)}});
      p.B = Scalar(0.2) * DenseMatrix<Scalar>::Ones(n, 1);
      p.C = Scalar(0.1) * DenseMatrix<Scalar>::Ones(1, n);
      out.care = std::move(p);
      return out;
    }
    case Family::RandomPositiveReal: {
      std::mt19937_64 gen(spec.seed);
      DenseMatrix<Scalar> F(n, n);
      for (Index i = 0; i < n; ++i) {
        Scalar off_sum = Scalar(0);
        for (Index j = 0; j < n; ++j) {
          if (i == j) continue;
          const Scalar v = Scalar(2) * Scalar(detail::unit_draw(gen)) - Scalar(1);
          F(i, j) = v;
          off_sum += std::abs(v);
        }
        // Strict diagonal dominance with a positive margin keeps every
        // Gershgorin disc in the open right half-plane.
        F(i, i) = off_sum + Scalar(0.5) + Scalar(detail::unit_draw(gen));
      }
      const Index p_rows = 1 + Index(spec.seed % 2);
      DenseMatrix<Scalar> C(p_rows, n);
      for (Index i = 0; i < p_rows; ++i) {
        for (Index j = 0; j < n; ++j) {
          C(i, j) = Scalar(2) * Scalar(detail::unit_draw(gen)) - Scalar(1);
        }
      }
      LyapProblem<Scalar> p;
      p.F = F.sparseView();
      p.C = std::move(C);
      out.lyap = std::move(p);
      return out;
    }
  }
  throw UnknownFamily("generate: unrecognized family value");
}

}  // namespace adi
