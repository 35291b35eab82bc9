#pragma once

// Conditional expectations of the filtration M_n ⊕ ℓ_∞^{N-n} ⊂ M_N, and their
// factor-wise extension to finite truncations of
//   L_∞({±1}^m) ⊗ M_{N_1} ⊗ ... ⊗ M_{N_F}.

#include <functional>
#include <string>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/random.hpp"

namespace ncmart {

/// Level n of the filtration inside one factor M_N, 1 <= n <= N.
struct FactorLevel {
  Index ambient;
  Index level;

  /// Throws std::out_of_range unless 1 <= level <= ambient.
  FactorLevel(Index ambient, Index level);
};

/// E_n on M_N: keeps the upper-left n x n block, keeps only the diagonal of
/// the lower-right block and zeroes both off-diagonal blocks.
Operator factor_cond_exp(const FactorLevel& lvl, const Operator& x);
Matrix factor_cond_exp(Index level, const Matrix& x);

/// Finite truncation of the big algebra. The sign component ℓ_∞^{2^m} comes
/// first in the Kronecker order, then the factors in ascending size. Elements
/// are block diagonal across the 2^m sign configurations. Sign coordinate k
/// (1-based) is bit m-k of the configuration index, so eps_1 is outermost.
class TruncatedBigAlgebra {
 public:
  /// Throws std::invalid_argument on a malformed descriptor (non-positive or
  /// decreasing factor sizes) and std::length_error above `dim_cap`.
  TruncatedBigAlgebra(Index sign_count, std::vector<Index> factors,
                      Index dim_cap = kDefaultDimCap);

  Index sign_count() const { return signs_; }
  const std::vector<Index>& factors() const { return factors_; }
  Index sign_dim() const { return Index{1} << signs_; }
  /// Product of the factor sizes.
  Index factor_dim() const { return factor_dim_; }
  Index dim() const { return sign_dim() * factor_dim_; }
  /// Normalized trace: uniform average over signs times normalized factor traces.
  TracialAlgebra algebra() const { return TracialAlgebra::normalized(dim()); }

  /// Highest level at which the filtration is still moving; E_n = id beyond it.
  Index top_level() const;

  /// Index of the factor slot of size n, or -1.
  Index factor_slot(Index size) const;

  /// True if x is block diagonal over the sign configurations.
  bool contains(const Operator& x, double tol = 1e-12) const;

  /// eps_k as a diagonal ±1 operator (identity on the factors).
  Operator sign_operator(Index k) const;

  /// Places `m` (size N_slot) in factor slot `slot`, identity elsewhere.
  Operator embed_factor(Index slot, const Matrix& m) const;

  /// Random element: independent Gaussian factor-block per sign configuration.
  Operator random_element(Rng& rng) const;

 private:
  Index signs_;
  std::vector<Index> factors_;
  Index factor_dim_;
};

/// E_n on the truncated algebra. Identity on the sign component; on a factor
/// of size N_k it acts as factor_cond_exp(min(n, N_k)); for n = 0 every factor
/// is replaced by its normalized trace times the identity.
Operator big_cond_exp(const TruncatedBigAlgebra& alg, Index n, const Operator& x);

/// Applies a linear map on M_{N_slot} to one tensor slot of a matrix living on
/// the product of `dims` (Kronecker order).
Matrix apply_on_slot(const Matrix& x, const std::vector<Index>& dims, std::size_t slot,
                     const std::function<Matrix(const Matrix&)>& map);

enum class CondExpAxiom {
  trace_preservation,
  unitality,
  idempotence,
  positivity,
  self_adjointness,
  bimodule,
  contractivity_l1,
  contractivity_l2,
  contractivity_linf,
};

std::string to_string(CondExpAxiom a);

struct AxiomFailure {
  CondExpAxiom axiom;
  int trial;
  double deviation;
  std::string witness;
};

struct CondExpReport {
  int trials = 0;
  std::vector<AxiomFailure> failures;  // first failure per axiom
  bool passed() const { return failures.empty(); }
  bool failed(CondExpAxiom a) const;
};

using OperatorMap = std::function<Operator(const Operator&)>;
using OperatorSampler = std::function<Operator(Rng&)>;

/// Checks a candidate conditional expectation on random inputs drawn from
/// `sample`: trace preservation, unitality, idempotence, positivity, E(X*) =
/// E(X)*, the bimodule property with a, b drawn from the range of E, and
/// L_p contractivity for p in {1, 2, inf}.
CondExpReport check_condexp_axioms(const OperatorMap& e, const OperatorSampler& sample,
                                   int trials, std::uint64_t seed, double tol = 1e-8);

/// Same, sampling Gaussian operators from the full algebra `alg`.
CondExpReport check_condexp_axioms(const OperatorMap& e, const TracialAlgebra& alg, int trials,
                                   std::uint64_t seed, double tol = 1e-8);

}  // namespace ncmart
