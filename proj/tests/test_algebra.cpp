#include <doctest.h>

#include "ncmart/algebra.hpp"
#include "ncmart/random.hpp"

using namespace ncmart;

TEST_CASE("trace conventions") {
  const auto tau = TracialAlgebra::normalized(4);
  const auto tr = TracialAlgebra::unnormalized(4);
  CHECK(std::abs(trace(Operator::identity(tau)) - 1.0) < 1e-15);
  CHECK(std::abs(trace(Operator::identity(tr)) - 4.0) < 1e-15);
  CHECK(std::abs(trace(matrix_unit(tau, 2, 2)) - 0.25) < 1e-15);
  CHECK(std::abs(trace(matrix_unit(tau, 1, 2))) == 0.0);
  CHECK_THROWS_AS(matrix_unit(tau, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(matrix_unit(tau, 1, 5), std::out_of_range);
}

TEST_CASE("trace is cyclic and positive") {
  const auto alg = TracialAlgebra::normalized(5);
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Operator a = random_operator(alg, rng);
    const Operator b = random_operator(alg, rng);
    CHECK(std::abs(trace(a * b) - trace(b * a)) < 1e-9);
    const cplx pos = trace(a.adjoint() * a);
    CHECK(pos.real() > 0.0);
    CHECK(std::abs(pos.imag()) < 1e-12);
  }
}

TEST_CASE("products across algebras are rejected") {
  const Operator a = Operator::identity(TracialAlgebra::normalized(3));
  const Operator b = Operator::identity(TracialAlgebra::unnormalized(3));
  CHECK_THROWS_AS(a * b, std::invalid_argument);
  CHECK_THROWS_AS(a + b, std::invalid_argument);
}

TEST_CASE("tensor product multiplies traces") {
  Rng rng(3);
  const auto tau = TracialAlgebra::normalized(3);
  const auto tr = TracialAlgebra::unnormalized(2);
  const Operator a = random_operator(tau, rng);
  const Operator b = random_operator(tr, rng);
  const Operator ab = tensor(a, b);
  CHECK(ab.dim() == 6);
  CHECK(std::abs(trace(ab) - trace(a) * trace(b)) < 1e-12);
  CHECK(ab.algebra().weight() == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(tensor(a, b, 5), std::length_error);
}

TEST_CASE("projections validate and report corank") {
  const auto alg = TracialAlgebra::normalized(4);
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = 0.0;
  const Projection e = Projection::from_operator(Operator(alg, m));
  CHECK(e.rank() == 3);
  CHECK(e.corank() == 1);
  CHECK(e.normalized_corank() == doctest::Approx(0.25));
  m(3, 3) = 0.5;
  CHECK_THROWS_AS(Projection::from_operator(Operator(alg, m)), std::invalid_argument);
  m(3, 3) = 0.0;
  m(0, 1) = 0.3;
  CHECK_THROWS_AS(Projection::from_operator(Operator(alg, m)), std::invalid_argument);
}

TEST_CASE("spectral projection counts eigenvalues in the window") {
  const auto alg = TracialAlgebra::normalized(4);
  Rng rng(5);
  const Matrix u = random_unitary(4, rng);
  Eigen::VectorXd d(4);
  d << -1.0, 0.5, 2.0, 3.0;
  const Operator h(alg, u * d.cast<cplx>().asDiagonal() * u.adjoint());
  CHECK(spectral_projection(h, 0.0, 2.5).rank() == 2);
  CHECK(spectral_projection(h, 0.5, 2.0).rank() == 2);  // both endpoints count
  CHECK(spectral_projection(h, 10.0, 11.0).rank() == 0);
  Matrix nh = h.matrix();
  nh(0, 1) += 1.0;
  CHECK_THROWS_AS(spectral_projection(Operator(alg, nh), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("abs value squares to Z*Z") {
  const auto alg = TracialAlgebra::normalized(5);
  Rng rng(8);
  const Operator z = random_operator(alg, rng);
  const Operator a = abs_value(z);
  CHECK(((a * a).matrix() - (z.adjoint() * z).matrix()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(hermitian_eigenvalues(a.matrix()).minCoeff() > -1e-12);
}


TEST_CASE("projection meet matches alternating projections") {
  const auto alg = TracialAlgebra::normalized(6);
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    // Ranges of dimension 4 in C^6 meet in dimension >= 2; the shared plane
    // makes the intersection exactly 2-dimensional generically.
    const Matrix shared = random_frame(6, 2, rng);
    Matrix f1(6, 4), f2(6, 4);
    f1 << shared, gaussian_matrix(6, 2, rng);
    f2 << shared, gaussian_matrix(6, 2, rng);
    const Projection e1 = Projection::onto_span(alg, f1);
    const Projection e2 = Projection::onto_span(alg, f2);
    const Projection m = projection_meet(e1, e2);
    CHECK(m.rank() == 2);
    Matrix ref = e1.matrix();
    for (int k = 0; k < 3000; ++k) ref = e1.matrix() * e2.matrix() * ref;
    // ref -> meet applied to e1, which is the meet itself.
    CHECK((ref - m.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(m.is_below(e1));
    CHECK(m.is_below(e2));
    CHECK(m.normalized_corank() <= e1.normalized_corank() + e2.normalized_corank() + 1e-12);
  }
}

TEST_CASE("meet of a list is order independent") {
  const auto alg = TracialAlgebra::normalized(5);
  Rng rng(2);
  std::vector<Projection> es;
  for (int k = 0; k < 3; ++k) es.push_back(random_projection(alg, 1, rng));
  const Projection a = projection_meet(es);
  std::vector<Projection> rev(es.rbegin(), es.rend());
  const Projection b = projection_meet(rev);
  CHECK(a.corank() == 3);
  CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}
