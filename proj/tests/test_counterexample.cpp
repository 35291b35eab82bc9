#include <doctest.h>

#include <cmath>

#include "ncmart/counterexample.hpp"
#include "ncmart/random.hpp"

using namespace ncmart;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double gram_lp_power(const Operator& a, double p) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(a.matrix().adjoint() * a.matrix());
  const double smax = std::sqrt(std::max(ev.maxCoeff(), 0.0));
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    const double sv = std::sqrt(std::max(ev(i), 0.0));
    if (sv > 1e-7 * smax) s += std::pow(sv, p);
  }
  return a.algebra().weight() * s;
}

}  // namespace

TEST_CASE("X_N and its normalizations") {
  for (Index N : {2, 4, 8, 16, 64}) {
    CHECK(lp_norm(build_XN(N), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double p : {1.0, 1.2, 1.5, 1.9})
      CHECK(std::abs(lp_norm(build_XpN(p, N), p) - 1.0) <= 1e-10);
  }
  const Operator xi = build_xi(3);
  CHECK(max_abs((xi * xi.adjoint()).matrix() - build_XN(3).matrix()) == 0.0);
  CHECK(max_abs(build_eta(3, 3).matrix() - xi.matrix()) == 0.0);
}

TEST_CASE("martingale of X_N in closed form") {
  const Index N = 5;
  const MartingaleSequence seq = martingale_of_XN(N);
  REQUIRE(seq.size() == 5);
  CHECK_FALSE(seq.validate(1e-12).has_value());
  for (Index n = 1; n <= N; ++n) {
    const Matrix& m = seq[static_cast<std::size_t>(n - 1)].matrix();
    for (Index i = 0; i < N; ++i)
      for (Index j = 0; j < N; ++j) {
        const double expect = (i < n && j < n) || (i == j) ? 1.0 : 0.0;
        CHECK(m(i, j).real() == expect);
      }
  }
  // Y_n + D_n at the top level is X_N itself.
  CHECK(max_abs(seq[N - 1].matrix() - build_XN(N).matrix()) == 0.0);
}

TEST_CASE("T_n bounds and the closed form at n = 2") {
  for (Index n : {1, 2, 3, 7, 16, 33, 64})
    for (double p : {0.1, 0.25, 0.4, 0.49}) {
      const TnBoundsReport r = tn_bounds_check(n, p);
      CHECK_MESSAGE(r.holds, "n=" << n << " p=" << p);
      CHECK(std::pow(r.value, p) == doctest::Approx(gram_lp_power(build_Tn(n), p)).epsilon(1e-6));
    }
  CHECK(tn_bounds_check(1, 0.3).value == doctest::Approx(1.0));
  CHECK(std::abs(tn_bounds_check(2, 0.5).value - (2.0 + std::sqrt(5.0))) < 1e-9);
  CHECK_THROWS_AS(tn_bounds_check(4, 1.0), std::invalid_argument);
}

TEST_CASE("v_k recursion") {
  for (double p : {0.1, 0.25, 0.4, 0.49}) {
    const VkRecursionReport r = vk_recursion_check(6, p);
    CHECK(r.holds());
    CHECK(r.v.size() == 7);
    CHECK(r.increments.front() == doctest::Approx(0.5));
  }
}

TEST_CASE("chain constants") {
  const ChainConstants k = chain_constants(0.25);
  CHECK(k.c_p == doctest::Approx(std::ldexp(1.0, -9)));
  CHECK(k.C_p == doctest::Approx(std::pow(2.0 / (1.0 - std::pow(2.0, -0.5)), 2.0)));
  // C_p^p t'^{1/2} = c_p^p / 2 by construction.
  CHECK(std::pow(k.C_p, 0.25) * std::sqrt(k.t_prime) == doctest::Approx(std::pow(k.c_p, 0.25) / 2));
  CHECK(k.delta == doctest::Approx(std::pow(std::pow(k.c_p, 0.25) / 2, 4.0) / 2));
  CHECK_THROWS_AS(chain_constants(0.5), std::invalid_argument);
  CHECK(certified_lower_bound(0.25, 1e-3).applies);
  CHECK_FALSE(certified_lower_bound(0.25, 0.1).applies);
  CHECK(certified_lower_bound(0.25, 1e-3).at(16) == doctest::Approx(4 * k.delta));
}

TEST_CASE("A = B + C and the contraction") {
  const Index N = 6;
  Rng rng(41);
  const Projection e = random_projection(TracialAlgebra::normalized(N), 1, rng);
  const double m = half_sup_norm(N, e);
  const Operator a = build_A(N);
  const Operator b = build_B(N, e, m);
  const Operator c = build_C(N, e);
  CHECK(max_abs(a.matrix() - b.matrix() - c.matrix()) < 1e-12);
  CHECK(max_contraction_norm(N, e, m) <= 1.0 + 1e-9);
  CHECK_THROWS_AS(build_B(N, e, 0.1 * m), std::domain_error);
  // Identity projection: C vanishes.
  const Projection one = Projection::identity(TracialAlgebra::normalized(N));
  CHECK(max_abs(build_C(N, one).matrix()) == 0.0);
  CHECK(half_sup_norm(N, one) == doctest::Approx(N / 2.0));
}

TEST_CASE("chain assertions on random projections") {
  for (Index N : {4, 8}) {
    const Index corank = N / 8;
    for (int k = 0; k < 10; ++k) {
      Rng rng(derive_seed(N, static_cast<std::uint64_t>(k)));
      const Projection e = random_projection(TracialAlgebra::normalized(N), corank, rng);
      const ChainReport r = chain_verify(N, 0.25, 0.125, e);
      CHECK(r.passed());
      CHECK(r.norm_A >= N / 512.0);
      CHECK(r.decomposition_error <= 1e-9);
    }
  }
  Rng rng(1);
  const Projection big = random_projection(TracialAlgebra::normalized(8), 3, rng);
  CHECK_THROWS_AS(chain_verify(8, 0.25, 0.125, big), std::invalid_argument);
}

TEST_CASE("factorials and admissible terms") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(5) == 120);
  CHECK(factorial(20) == 2432902008176640000LL);
  CHECK_THROWS_AS(factorial(21), std::overflow_error);
  const TruncatedBigAlgebra alg(2, {1, 2});
  CHECK(admissible_terms(alg) == std::vector<Index>{1, 2});
  const TruncatedBigAlgebra alg2(2, {2, 6});
  CHECK(admissible_terms(alg2) == std::vector<Index>{2});
}

TEST_CASE("sign flip is a trace preserving involution") {
  const TruncatedBigAlgebra alg(2, {2, 3});
  Rng rng(6);
  const Operator x = alg.random_element(rng);
  for (Index k : {1, 2}) {
    const Operator y = sign_flip(alg, k, x);
    CHECK(max_abs(sign_flip(alg, k, y).matrix() - x.matrix()) == 0.0);
    CHECK(std::abs(trace(y) - trace(x)) < 1e-12);
    CHECK(max_abs(sign_flip(alg, k, alg.sign_operator(k)).matrix() + alg.sign_operator(k).matrix()) == 0.0);
  }
}

TEST_CASE("flip identity on the smallest truncation") {
  const TruncatedBigAlgebra alg(2, {1, 2});
  for (double p : {1.0, 1.5}) {
    const FlipIdentityReport r = flip_identity_check(alg, p, 2);
    CHECK(r.holds());
    CHECK(r.identity_deviation <= 1e-10);
  }
  CHECK_THROWS_AS(build_truncated_Xp(alg, 1.0, {3}), std::invalid_argument);
}
