#include <doctest.h>

#include "ncmart/condexp.hpp"
#include "ncmart/random.hpp"

using namespace ncmart;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("factor level validation") {
  CHECK_THROWS_AS(FactorLevel(4, 0), std::out_of_range);
  CHECK_THROWS_AS(FactorLevel(4, 5), std::out_of_range);
  CHECK_NOTHROW(FactorLevel(4, 4));
}

TEST_CASE("factor expectation keeps the block and the diagonal") {
  const auto alg = TracialAlgebra::normalized(4);
  Matrix x(4, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) x(i, j) = cplx(1 + i, j);
  const Matrix y = factor_cond_exp(FactorLevel(4, 2), Operator(alg, x)).matrix();
  Matrix expect = Matrix::Zero(4, 4);
  expect.topLeftCorner(2, 2) = x.topLeftCorner(2, 2);
  expect(2, 2) = x(2, 2);
  expect(3, 3) = x(3, 3);
  CHECK(max_abs(y - expect) == 0.0);
  CHECK(max_abs(factor_cond_exp(FactorLevel(4, 4), Operator(alg, x)).matrix() - x) == 0.0);
  // Level 1 and the matrix overload at level 0 both give the diagonal.
  CHECK(max_abs(factor_cond_exp(0, x) - Matrix(x.diagonal().asDiagonal())) == 0.0);
  CHECK(max_abs(factor_cond_exp(1, x) - Matrix(x.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("factor expectations satisfy the axioms") {
  for (Index N : {4, 8}) {
    const auto alg = TracialAlgebra::normalized(N);
    for (Index n = 1; n <= N; ++n) {
      const FactorLevel lvl(N, n);
      auto e = [lvl](const Operator& x) { return factor_cond_exp(lvl, x); };
      const CondExpReport rep = check_condexp_axioms(e, alg, 30, 100 + static_cast<std::uint64_t>(n));
      CHECK_MESSAGE(rep.passed(), "N=" << N << " n=" << n);
    }
  }
}

TEST_CASE("axiom checker catches broken maps") {
  const auto alg = TracialAlgebra::normalized(4);
  // Not unital and not trace preserving.
  auto half = [](const Operator& x) { return 0.5 * x; };
  const CondExpReport r1 = check_condexp_axioms(half, alg, 10, 1);
  CHECK(r1.failed(CondExpAxiom::unitality));
  CHECK(r1.failed(CondExpAxiom::trace_preservation));
  // Transpose: unital, trace preserving, positive, but not a bimodule map
  // over its range (the whole algebra) and not idempotent.
  auto transpose = [](const Operator& x) { return Operator(x.algebra(), x.matrix().transpose()); };
  const CondExpReport r2 = check_condexp_axioms(transpose, alg, 10, 2);
  CHECK(r2.failed(CondExpAxiom::idempotence));
  CHECK_FALSE(r2.failed(CondExpAxiom::unitality));
}

TEST_CASE("truncated big algebra bookkeeping") {
  const TruncatedBigAlgebra alg(2, {2, 6});
  CHECK(alg.sign_dim() == 4);
  CHECK(alg.factor_dim() == 12);
  CHECK(alg.dim() == 48);
  CHECK(alg.top_level() == 6);
  CHECK(alg.factor_slot(6) == 1);
  CHECK(alg.factor_slot(3) == -1);
  CHECK_THROWS_AS(TruncatedBigAlgebra(1, {6, 2}), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedBigAlgebra(1, {0}), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedBigAlgebra(3, {24, 120}), std::length_error);

  // eps_1 is the outermost sign bit.
  const Matrix e1 = alg.sign_operator(1).matrix();
  CHECK(e1(0, 0) == 1.0);
  CHECK(e1(47, 47) == -1.0);
  CHECK(e1(24, 24) == -1.0);
  CHECK(e1(23, 23) == 1.0);
  const Matrix e2 = alg.sign_operator(2).matrix();
  CHECK(e2(12, 12) == -1.0);
  CHECK(e2(24, 24) == 1.0);
}

TEST_CASE("big expectations satisfy the axioms on the truncation") {
  const TruncatedBigAlgebra alg(2, {2, 6});
  OperatorSampler sample = [&alg](Rng& rng) { return alg.random_element(rng); };
  for (Index n = 0; n <= alg.top_level(); ++n) {
    auto e = [&alg, n](const Operator& x) { return big_cond_exp(alg, n, x); };
    const CondExpReport rep = check_condexp_axioms(e, sample, 20, 7 + static_cast<std::uint64_t>(n));
    CHECK_MESSAGE(rep.passed(), "level " << n);
  }
}

TEST_CASE("big expectations form a filtration") {
  const TruncatedBigAlgebra alg(1, {2, 3});
  Rng rng(31);
  const Operator x = alg.random_element(rng);
  for (Index a = 0; a <= alg.top_level(); ++a) {
    for (Index b = 0; b <= alg.top_level(); ++b) {
      const Matrix ab = big_cond_exp(alg, a, big_cond_exp(alg, b, x)).matrix();
      const Matrix lo = big_cond_exp(alg, std::min(a, b), x).matrix();
      CHECK(max_abs(ab - lo) < 1e-12);
    }
  }
  // Level 0 keeps only the sign data: each factor becomes its trace.
  const Operator y = big_cond_exp(alg, 0, x);
  const Operator f = alg.embed_factor(1, Matrix::Ones(3, 3));
  CHECK(max_abs(big_cond_exp(alg, 0, f).matrix() - Matrix::Identity(alg.dim(), alg.dim())) < 1e-12);
  CHECK(alg.contains(y));
}

TEST_CASE("apply_on_slot acts on one Kronecker factor") {
  Rng rng(3);
  const Matrix a = gaussian_matrix(2, 2, rng);
  const Matrix b = gaussian_matrix(3, 3, rng);
  Matrix ab(6, 6);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) ab.block(3 * i, 3 * j, 3, 3) = a(i, j) * b;
  auto tr = [](const Matrix& m) { return Matrix(m.transpose()); };
  const Matrix got = apply_on_slot(ab, {2, 3}, 1, tr);
  Matrix expect(6, 6);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) expect.block(3 * i, 3 * j, 3, 3) = a(i, j) * b.transpose();
  CHECK(max_abs(got - expect) < 1e-14);
}
