#pragma once

// Ergodic averages of a convex combination of conditional expectations,
// subsequences of those averages that track the martingale, Markov-inequality
// truncations with their meet, and Cesàro averages of conjugation by a
// diagonal unitary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/condexp.hpp"
#include "ncmart/schatten.hpp"

namespace ncmart {

/// Largest dimension for which a Markov operator is stored as a d^2 x d^2
/// matrix (1024^2 complex entries).
inline constexpr Index kMarkovDimCap = 32;

/// A linear map on the operators of one algebra, stored as a d^2 x d^2 matrix
/// acting on column-major vec(X).
struct MarkovOperator {
  TracialAlgebra algebra;
  Matrix matrix;
  std::vector<double> alphas;  // empty unless built by convex_markov
  std::string description;

  Operator apply(const Operator& x) const;
};

/// Tabulates `map` on the matrix units. Throws std::length_error above
/// kMarkovDimCap.
MarkovOperator markov_from_map(const TracialAlgebra& alg, const OperatorMap& map,
                               std::string description);

/// T = Σ_{n<L} (α_{n+1} - α_n) E_n + (1 - α_L) id for alphas = (α_0..α_L).
/// Throws std::invalid_argument unless 0 = α_0 < α_1 < ... < α_L <= 1.
MarkovOperator convex_markov(const std::vector<double>& alphas, const TruncatedBigAlgebra& alg);

/// α_n = 1 - 2^{-n}, n = 0..levels.
std::vector<double> geometric_alphas(Index levels);

/// α_0 = 0, α_k = scale * ratio^{-(levels-k)}: widely separated weights, so
/// the averages pass through each E_n in turn.
std::vector<double> separated_alphas(Index levels, double ratio = 50.0, double scale = 0.9);

struct MarkovInvariantReport {
  double unital_deviation;        // max |T(1) - 1|
  double trace_deviation;         // max |τ(T X) - τ(X)| over trials
  double min_eigenvalue;          // min over trials of λ_min(T(A*A))
  double commutation_deviation;   // max |T E_n X - E_n T X| (0 when no levels given)
  double tol;
  bool holds() const;
};

/// Unitality, trace preservation and positivity on random inputs, plus
/// commutation with E_0..E_top of `alg` when supplied.
MarkovInvariantReport check_markov_invariants(const MarkovOperator& T, int trials,
                                              std::uint64_t seed,
                                              const TruncatedBigAlgebra* alg = nullptr,
                                              double tol = 1e-9);

/// (1/n) Σ_{k<n} T^k x by iteration. Throws std::invalid_argument if n < 1.
Operator ergodic_average(const MarkovOperator& T, const Operator& x, long n);

struct SubsequenceRow {
  Index level;
  long m;        // first checkpoint meeting tol, else the best checkpoint seen
  double error;  // ||M_m(T) X - E_level X||_p
  bool hit;
};

struct SubsequenceReport {
  double p;
  double tol;
  long cap;
  std::vector<SubsequenceRow> rows;  // levels 0..top
  double error_sum;
  bool all_hit() const;
  bool sum_at_most_one() const { return error_sum <= 1.0; }
};

/// For every level n scans m = 1, 2, ... (geometric checkpoints, ratio
/// `ratio`) until ||M_m(T) X - E_n X||_p <= tol or m exceeds `cap`. A single
/// pass of the running sum serves all levels.
SubsequenceReport find_subsequence(const MarkovOperator& T, const TruncatedBigAlgebra& alg,
                                   const Operator& x, PExponent p, double tol,
                                   long cap = 1'000'000, double ratio = 1.25);

struct TruncationRow {
  double corank;       // τ(1 - e_n)
  double markov_rhs;   // λ^{-p} ||Z_n||_p^p
  double own_norm;     // ||Z_n e_n||
  double meet_norm;    // ||Z_n e||
};

struct TruncationReport {
  double t;
  double p;
  double lambda;  // t^{-1/p}
  std::vector<TruncationRow> rows;
  double meet_corank;  // τ(1 - e)
  double corank_sum;   // Σ τ(1 - e_n)
  double mu_bound;     // sup_n ||Z_n e|| via mu_eval
  bool markov_ok, own_norm_ok, meet_norm_ok, subadditive_ok;
  bool holds() const { return markov_ok && own_norm_ok && meet_norm_ok && subadditive_ok; }
};

struct TruncationResult {
  Projection e;
  TruncationReport report;
};

/// e_n = 1_{[0,λ]}(|Z_n|) with λ = t^{-1/p}, e = ∧ e_n. Throws
/// std::invalid_argument unless t in (0,1), p >= 1 and the list is non-empty.
TruncationResult truncate_and_meet(const std::vector<Operator>& zs, double t, double p);

enum class PhaseConvention {
  reciprocal,  // φ_k = K^{-(N-k)}
  shifted,     // φ_k = K^{-(N-k+1)}
};

std::string to_string(PhaseConvention c);

/// φ_1..φ_N for U_N = Σ_k e^{2πi φ_k} e_{k,k}.
std::vector<double> unitary_phases(Index N, Index K, PhaseConvention c = PhaseConvention::reciprocal);

/// U_N in (M_N, τ_N). Throws std::invalid_argument unless K >= 2.
Operator diagonal_unitary(Index N, Index K, PhaseConvention c = PhaseConvention::reciprocal);

/// (1/L) Σ_{j<L} e^{2πi j Δ} in closed form; L may be astronomically large.
cplx dirichlet_factor(long double L, double delta);

/// (1/L) Σ_{j<L} U^j x U^{-j} for U = diag(e^{2πi φ}), via Dirichlet factors.
Operator conj_average(const std::vector<double>& phases, const Operator& x, long double L);
/// Same with the phases read off a diagonal unitary.
Operator conj_average(const Operator& u, const Operator& x, long double L);
/// Reference: L explicit conjugations.
Operator conj_average_explicit(const Operator& u, const Operator& x, long L);

struct UnitaryKRow {
  Index K;
  double worst_ratio;  // max over trials of lhs / ||x||_p
  bool holds;          // lhs <= ||x||_p for every trial
};

struct UnitaryApproxReport {
  Index N;
  double p;
  int trials;
  std::uint64_t seed;
  PhaseConvention convention;
  std::vector<UnitaryKRow> rows;
  std::optional<Index> minimal_K;
  double unit_lhs;            // the left side at x = 1 (expected 0)
  double u_minus_one;         // ||U_N - 1|| at the largest K, computed
  double u_minus_one_formula; // max_k 2 |sin(π φ_k)|
  double u_target;            // 2^{-N}, reported only
};

/// For each K (ascending) checks
///   Σ_{n=0}^N ||E_{N-n}(x) - (1/K^n) Σ_{k<K^n} U^k x U^{-k}||_p <= ||x||_p
/// on `trials` random x. Level 0 inside M_N is the diagonal expectation.
UnitaryApproxReport unitary_approx_check(Index N, const std::vector<Index>& Ks, double p,
                                         int trials, std::uint64_t seed,
                                         PhaseConvention c = PhaseConvention::reciprocal);

}  // namespace ncmart
