#pragma once

// Finite-dimensional tracial matrix algebras: operators, traces, tensor
// products, matrix units, spectral projections and the projection lattice.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ncmart {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Default bound on the side length of any tensor product we build.
inline constexpr Index kDefaultDimCap = 4096;

/// Tolerance used to accept an operator as a projection.
inline constexpr double kProjectionTol = 1e-9;

enum class TraceMode { normalized, unnormalized, weighted };

/// M_d with a faithful trace. The trace is `weight * sum(diag)`:
/// weight 1/d for the normalized trace, 1 for the unnormalized one, and the
/// product of the factor weights for mixed tensor products such as
/// (M_N, tau_N) (x) (M_N, tr_N).
class TracialAlgebra {
 public:
  static TracialAlgebra normalized(Index dim);
  static TracialAlgebra unnormalized(Index dim);
  static TracialAlgebra weighted(Index dim, double weight);

  Index dim() const { return dim_; }
  double weight() const { return weight_; }
  TraceMode mode() const { return mode_; }

  /// Trace of the identity.
  double unit_trace() const { return weight_ * static_cast<double>(dim_); }

  bool operator==(const TracialAlgebra& other) const;

 private:
  TracialAlgebra(Index dim, double weight, TraceMode mode);

  Index dim_;
  double weight_;
  TraceMode mode_;
};

/// A dense complex d x d matrix tagged with its ambient algebra.
class Operator {
 public:
  Operator(TracialAlgebra alg, Matrix entries);

  static Operator identity(const TracialAlgebra& alg);
  static Operator zero(const TracialAlgebra& alg);

  const TracialAlgebra& algebra() const { return alg_; }
  const Matrix& matrix() const { return m_; }
  Index dim() const { return alg_.dim(); }
  cplx operator()(Index i, Index j) const { return m_(i, j); }

  Operator adjoint() const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  TracialAlgebra alg_;
  Matrix m_;
};

/// Throws std::invalid_argument unless both operators live in the same algebra.
void require_same_algebra(const Operator& a, const Operator& b);

/// Hermitian idempotent with spectrum in {0, 1}.
class Projection {
 public:
  /// Validates e = e*, e^2 = e and spectrum within `tol` of {0,1}.
  /// Throws std::invalid_argument otherwise.
  static Projection from_operator(const Operator& e, double tol = kProjectionTol);

  /// Re-symmetrizes, rounds the spectrum to {0,1} and reconstructs. Use on
  /// operators that are projections up to rounding drift.
  static Projection clean(const Operator& e);

  /// Orthogonal projection onto the span of the columns of `frame`.
  /// The columns need not be orthonormal.
  static Projection onto_span(const TracialAlgebra& alg, const Matrix& frame);

  static Projection identity(const TracialAlgebra& alg);
  static Projection zero(const TracialAlgebra& alg);

  const Operator& op() const { return e_; }
  const Matrix& matrix() const { return e_.matrix(); }
  const TracialAlgebra& algebra() const { return e_.algebra(); }
  Index dim() const { return e_.dim(); }

  Index rank() const { return rank_; }
  Index corank() const { return dim() - rank_; }
  /// corank / d, which equals tau(1 - e) for the normalized trace.
  double normalized_corank() const;

  Projection complement() const;

  /// e <= f in the operator order (range inclusion), within tolerance.
  bool is_below(const Projection& f, double tol = 1e-8) const;

 private:
  Projection(Operator e, Index rank);

  Operator e_;
  Index rank_;
};

/// e_{i,j} with 1-based indices, matching the usual matrix-unit notation.
Operator matrix_unit(const TracialAlgebra& alg, Index i, Index j);

cplx trace(const Operator& a);

/// Kronecker product A (x) B in the product algebra; the trace weight is the
/// product of the factor weights so trace(A (x) B) = trace(A) trace(B).
/// Throws std::length_error if the product dimension exceeds `dim_cap`.
Operator tensor(const Operator& a, const Operator& b, Index dim_cap = kDefaultDimCap);
TracialAlgebra tensor(const TracialAlgebra& a, const TracialAlgebra& b,
                      Index dim_cap = kDefaultDimCap);

struct HermitianSpectrum {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. This is the single spectral
/// kernel behind spectral projections, meets and |Z|.
HermitianSpectrum hermitian_eigen(const Matrix& h);
Eigen::VectorXd hermitian_eigenvalues(const Matrix& h);

/// max_{ij} |H_ij - conj(H_ji)|
double hermiticity_defect(const Matrix& h);

/// 1_[lo,hi](H). Eigenvalues within 1e-9 of an endpoint count as inside.
/// Throws std::invalid_argument if H is not Hermitian within 1e-9.
Projection spectral_projection(const Operator& h, double lo, double hi);

/// |Z| = (Z* Z)^{1/2}
Operator abs_value(const Operator& z);

/// Projection onto range(e1) ∩ range(e2).
Projection projection_meet(const Projection& e1, const Projection& e2);
Projection projection_meet(const std::vector<Projection>& es);

}  // namespace ncmart
