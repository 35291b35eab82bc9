#pragma once

// Noncommutative L_p (Schatten) quasi-norms for 0 < p <= inf and the
// inequalities (p-triangle, Hoelder) the counterexample chain relies on.

#include <limits>
#include <string>
#include <vector>

#include "ncmart/algebra.hpp"

namespace ncmart {

/// An exponent 0 < p <= inf.
class PExponent {
 public:
  /// Throws std::invalid_argument unless p > 0 (infinity allowed).
  PExponent(double p);  // NOLINT(google-explicit-constructor): exponents read naturally as numbers
  static PExponent infinity() { return {std::numeric_limits<double>::infinity()}; }

  double value() const { return p_; }
  bool is_infinite() const { return p_ == std::numeric_limits<double>::infinity(); }
  /// 1/p, with 1/inf = 0.
  double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / p_; }

  /// p < 1: only a quasi-norm, satisfying the p-triangle inequality.
  bool is_quasi() const { return p_ < 1.0; }
  /// p < 1/2: the range where the L_p chain estimates apply.
  bool is_chain_admissible() const { return p_ < 0.5; }

  std::string to_string() const;

 private:
  double p_;
};

/// Descending singular values. Values below 1e-12 * sigma_max are reported as 0.
std::vector<double> singular_values(const Matrix& a);
std::vector<double> singular_values(const Operator& a);

/// (weight * sum_k sigma_k^p)^{1/p}, or sigma_max for p = inf. Zero singular
/// values contribute nothing for any p.
double lp_norm(const Operator& a, PExponent p);

/// weight * sum_k sigma_k^p  (the p-th power of the L_p norm, p finite).
double lp_norm_power(const Operator& a, PExponent p);

/// Operator norm (largest singular value).
double op_norm(const Matrix& a);

struct HolderCheck {
  double lhs;  // ||AB||_p
  double rhs;  // ||A||_r ||B||_q
  bool holds;  // lhs <= rhs (1 + 1e-9)
};

/// Evaluates both sides of ||AB||_p <= ||A||_r ||B||_q. The caller supplies
/// the split; throws std::invalid_argument unless 1/p = 1/r + 1/q.
HolderCheck holder_split_bound(const Operator& a, const Operator& b, PExponent p, PExponent r,
                               PExponent q);

}  // namespace ncmart
