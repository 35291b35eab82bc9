#include "ncmart/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ncmart {

// ---------------------------------------------------------------------------
// TracialAlgebra

TracialAlgebra::TracialAlgebra(Index dim, double weight, TraceMode mode)
    : dim_(dim), weight_(weight), mode_(mode) {
  if (dim < 1) throw std::invalid_argument("algebra dimension must be positive");
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("trace weight must be positive and finite");
}

TracialAlgebra TracialAlgebra::normalized(Index dim) {
  return {dim, 1.0 / static_cast<double>(dim), TraceMode::normalized};
}

TracialAlgebra TracialAlgebra::unnormalized(Index dim) {
  return {dim, 1.0, TraceMode::unnormalized};
}

TracialAlgebra TracialAlgebra::weighted(Index dim, double weight) {
  return {dim, weight, TraceMode::weighted};
}

bool TracialAlgebra::operator==(const TracialAlgebra& other) const {
  return dim_ == other.dim_ &&
         std::abs(weight_ - other.weight_) <= 1e-15 * std::max(weight_, other.weight_);
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(TracialAlgebra alg, Matrix entries) : alg_(alg), m_(std::move(entries)) {
  if (m_.rows() != alg_.dim() || m_.cols() != alg_.dim())
    throw std::invalid_argument("operator shape " + std::to_string(m_.rows()) + "x" +
                                std::to_string(m_.cols()) + " does not match algebra dimension " +
                                std::to_string(alg_.dim()));
}

Operator Operator::identity(const TracialAlgebra& alg) {
  return {alg, Matrix::Identity(alg.dim(), alg.dim())};
}

Operator Operator::zero(const TracialAlgebra& alg) {
  return {alg, Matrix::Zero(alg.dim(), alg.dim())};
}

Operator Operator::adjoint() const { return {alg_, m_.adjoint()}; }

void require_same_algebra(const Operator& a, const Operator& b) {
  if (!(a.algebra() == b.algebra()))
    throw std::invalid_argument("operators live in different algebras");
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_algebra(*this, rhs);
  m_ += rhs.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_algebra(*this, rhs);
  m_ -= rhs.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_algebra(a, b);
  return {a.alg_, a.m_ * b.m_};
}

// ---------------------------------------------------------------------------
// Spectral kernel

HermitianSpectrum hermitian_eigen(const Matrix& h) {
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& h) {
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  return es.eigenvalues();
}

double hermiticity_defect(const Matrix& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Projection

Projection::Projection(Operator e, Index rank) : e_(std::move(e)), rank_(rank) {}

Projection Projection::from_operator(const Operator& e, double tol) {
  const Matrix& m = e.matrix();
  if (hermiticity_defect(m) > tol) throw std::invalid_argument("projection is not self-adjoint");
  if ((m * m - m).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("projection is not idempotent");
  const Eigen::VectorXd ev = hermitian_eigenvalues(m);
  Index rank = 0;
  for (Index k = 0; k < ev.size(); ++k) {
    const double v = ev(k);
    if (std::abs(v) > tol && std::abs(v - 1.0) > tol)
      throw std::invalid_argument("projection eigenvalue " + std::to_string(v) +
                                  " is not in {0,1}");
    if (v > 0.5) ++rank;
  }
  return {e, rank};
}

Projection Projection::clean(const Operator& e) {
  const HermitianSpectrum sp = hermitian_eigen(e.matrix());
  std::vector<Index> keep;
  for (Index k = 0; k < sp.values.size(); ++k)
    if (sp.values(k) > 0.5) keep.push_back(k);
  Matrix frame(e.dim(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) frame.col(static_cast<Index>(c)) = sp.vectors.col(keep[c]);
  Matrix p = frame * frame.adjoint();
  p = 0.5 * (p + p.adjoint());
  return {Operator(e.algebra(), std::move(p)), static_cast<Index>(keep.size())};
}

Projection Projection::onto_span(const TracialAlgebra& alg, const Matrix& frame) {
  if (frame.rows() != alg.dim()) throw std::invalid_argument("frame row count mismatch");
  if (frame.cols() == 0) return zero(alg);
  // Orthonormalize through the Gram spectrum, dropping numerically dependent directions.
  const HermitianSpectrum sp = hermitian_eigen(frame.adjoint() * frame);
  const double top = std::max(sp.values.maxCoeff(), 0.0);
  std::vector<Index> keep;
  for (Index k = 0; k < sp.values.size(); ++k)
    if (sp.values(k) > 1e-12 * top && sp.values(k) > 0.0) keep.push_back(k);
  Matrix basis(alg.dim(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Index k = keep[c];
    basis.col(static_cast<Index>(c)) = frame * sp.vectors.col(k) / std::sqrt(sp.values(k));
  }
  Matrix p = basis * basis.adjoint();
  return clean(Operator(alg, 0.5 * (p + p.adjoint())));
}

Projection Projection::identity(const TracialAlgebra& alg) {
  return {Operator::identity(alg), alg.dim()};
}

Projection Projection::zero(const TracialAlgebra& alg) { return {Operator::zero(alg), 0}; }

double Projection::normalized_corank() const {
  return static_cast<double>(corank()) / static_cast<double>(dim());
}

Projection Projection::complement() const {
  return {Operator::identity(algebra()) - e_, corank()};
}

bool Projection::is_below(const Projection& f, double tol) const {
  // e <= f  iff  f e = e
  return (f.matrix() * matrix() - matrix()).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// Elementary operations

Operator matrix_unit(const TracialAlgebra& alg, Index i, Index j) {
  if (i < 1 || j < 1 || i > alg.dim() || j > alg.dim())
    throw std::out_of_range("matrix unit index (" + std::to_string(i) + "," + std::to_string(j) +
                            ") outside 1.." + std::to_string(alg.dim()));
  Matrix m = Matrix::Zero(alg.dim(), alg.dim());
  m(i - 1, j - 1) = 1.0;
  return {alg, std::move(m)};
}

cplx trace(const Operator& a) { return a.algebra().weight() * a.matrix().trace(); }

TracialAlgebra tensor(const TracialAlgebra& a, const TracialAlgebra& b, Index dim_cap) {
  if (a.dim() > dim_cap / b.dim())
    throw std::length_error("tensor product dimension " + std::to_string(a.dim()) + "*" +
                            std::to_string(b.dim()) + " exceeds cap " + std::to_string(dim_cap));
  const Index d = a.dim() * b.dim();
  if (a.mode() == TraceMode::normalized && b.mode() == TraceMode::normalized)
    return TracialAlgebra::normalized(d);
  if (a.mode() == TraceMode::unnormalized && b.mode() == TraceMode::unnormalized)
    return TracialAlgebra::unnormalized(d);
  return TracialAlgebra::weighted(d, a.weight() * b.weight());
}

Operator tensor(const Operator& a, const Operator& b, Index dim_cap) {
  const TracialAlgebra alg = tensor(a.algebra(), b.algebra(), dim_cap);
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  const Index db = y.rows();
  Matrix k(alg.dim(), alg.dim());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) k.block(i * db, j * db, db, db) = x(i, j) * y;
  return {alg, std::move(k)};
}

Projection spectral_projection(const Operator& h, double lo, double hi) {
  constexpr double kEndpointTol = 1e-9;
  if (hermiticity_defect(h.matrix()) > 1e-9)
    throw std::invalid_argument("spectral_projection needs a Hermitian operator");
  if (lo > hi) throw std::invalid_argument("empty spectral interval");
  const HermitianSpectrum sp = hermitian_eigen(h.matrix());
  std::vector<Index> keep;
  for (Index k = 0; k < sp.values.size(); ++k) {
    const double v = sp.values(k);
    if (v >= lo - kEndpointTol && v <= hi + kEndpointTol) keep.push_back(k);
  }
  Matrix frame(h.dim(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) frame.col(static_cast<Index>(c)) = sp.vectors.col(keep[c]);
  return Projection::clean(Operator(h.algebra(), frame * frame.adjoint()));
}

Operator abs_value(const Operator& z) {
  const HermitianSpectrum sp = hermitian_eigen(z.matrix().adjoint() * z.matrix());
  const Eigen::VectorXd roots = sp.values.cwiseMax(0.0).cwiseSqrt();
  Matrix r = sp.vectors * roots.asDiagonal() * sp.vectors.adjoint();
  return {z.algebra(), 0.5 * (r + r.adjoint())};
}

Projection projection_meet(const Projection& e1, const Projection& e2) {
  require_same_algebra(e1.op(), e2.op());
  // range(e1) ∩ range(e2) = ker((1 - e1) + (1 - e2)); the sum is positive, so
  // its kernel is the eigenspace of (numerically) zero eigenvalues.
  constexpr double kKernelTol = 1e-9;
  const Index d = e1.dim();
  const Matrix s = 2.0 * Matrix::Identity(d, d) - e1.matrix() - e2.matrix();
  const HermitianSpectrum sp = hermitian_eigen(s);
  std::vector<Index> keep;
  for (Index k = 0; k < sp.values.size(); ++k)
    if (sp.values(k) <= kKernelTol) keep.push_back(k);
  Matrix frame(d, static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) frame.col(static_cast<Index>(c)) = sp.vectors.col(keep[c]);
  return Projection::clean(Operator(e1.algebra(), frame * frame.adjoint()));
}

Projection projection_meet(const std::vector<Projection>& es) {
  if (es.empty()) throw std::invalid_argument("meet of an empty family");
  Projection acc = es.front();
  for (std::size_t k = 1; k < es.size(); ++k) acc = projection_meet(acc, es[k]);
  return acc;
}

}  // namespace ncmart
