#include "ncmart/random.hpp"

#include <stdexcept>

namespace ncmart {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  // Column-major fill order keeps the stream layout independent of Eigen internals.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

Matrix random_frame(Index d, Index k, Rng& rng) {
  if (k < 0 || k > d) throw std::invalid_argument("frame width out of range");
  if (k == 0) return Matrix(d, 0);
  const Matrix g = gaussian_matrix(d, k, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < k; ++j) {
    const cplx rjj = r(j, j);
    const double a = std::abs(rjj);
    if (a > 0.0) q.col(j) *= rjj / a;
  }
  return q;
}

Matrix random_unitary(Index d, Rng& rng) { return random_frame(d, d, rng); }

Operator random_operator(const TracialAlgebra& alg, Rng& rng) {
  return {alg, gaussian_matrix(alg.dim(), alg.dim(), rng)};
}

Operator random_hermitian(const TracialAlgebra& alg, Rng& rng) {
  const Matrix g = gaussian_matrix(alg.dim(), alg.dim(), rng);
  return {alg, 0.5 * (g + g.adjoint())};
}

Projection random_projection(const TracialAlgebra& alg, Index corank, Rng& rng) {
  if (corank < 0 || corank > alg.dim()) throw std::invalid_argument("corank out of range");
  const Matrix q = random_frame(alg.dim(), corank, rng);
  const Matrix e = Matrix::Identity(alg.dim(), alg.dim()) - q * q.adjoint();
  return Projection::clean(Operator(alg, 0.5 * (e + e.adjoint())));
}

}  // namespace ncmart
