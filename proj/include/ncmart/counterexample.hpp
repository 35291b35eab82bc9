#pragma once

// The explicit objects behind the counterexample: X_N = ξ_N ξ_N*, its
// martingale E_n(X_N) = Y_n + D_n, the triangular matrices T_n, the
// decomposition A_N = B_N + C_N in (M_N, τ_N) ⊗ (M_N, tr_N), the resulting
// inequality chain with its certified constants, and the finite truncations
// of the L_p element with the sign-flip identity.

#include <string>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/condexp.hpp"
#include "ncmart/schatten.hpp"
#include "ncmart/sequence.hpp"

namespace ncmart {

// --- X_N and its martingale -------------------------------------------------

/// ξ_N = Σ_k e_{k,1} in (M_N, τ_N): first column all ones.
Operator build_xi(Index N);
/// η_n = Σ_{k<=n} e_{k,1} in (M_N, τ_N).
Operator build_eta(Index n, Index N);
/// X_N = ξ_N ξ_N*, the all-ones matrix. ||X_N||_1 = 1 under τ_N.
Operator build_XN(Index N);
/// X_{p,N} = N^{1/p-1} X_N, normalized so that ||X_{p,N}||_p = 1.
Operator build_XpN(PExponent p, Index N);

/// Y_n = η_n η_n*, the all-ones n x n block.
Operator martingale_Y(Index N, Index n);
/// D_n = Σ_{k>n} e_{k,k}.
Operator martingale_D(Index N, Index n);

/// (E_n(X_N))_{n=1..N} from the closed form Y_n + D_n, cross-checked against
/// factor_cond_exp (throws std::logic_error on mismatch).
MartingaleSequence martingale_of_XN(Index N);

// --- T_n ------------------------------------------------------------------

/// T_n = Σ_{i<=j} e_{i,j} in (M_n, tr_n).
Operator build_Tn(Index n);

struct TnBoundsReport {
  Index n;
  double p;
  double lower;  // (n/2)^{1/p}
  double value;  // ||T_n||_p under tr_n
  double upper;  // (2n/(1-2^{p-1}))^{1/p}
  bool holds;    // lower <= value <= upper, relative tolerance 1e-9
};

/// Throws std::invalid_argument unless 0 < p < 1.
TnBoundsReport tn_bounds_check(Index n, double p);

struct VkRecursionReport {
  double p;
  std::vector<double> v;           // v_k = 2^{-k} ||T_{2^k}||_p^p, k = 0..kmax
  std::vector<double> increments;  // 2^{k(p-1)-1}, k = 0..kmax-1
  double cap;                      // 1 / (1 - 2^{p-1})
  bool v0_is_one;
  bool recursion_holds;
  bool cap_holds;
  bool holds() const { return v0_is_one && recursion_holds && cap_holds; }
};

VkRecursionReport vk_recursion_check(int kmax, double p, Index dim_cap = kDefaultDimCap);

// --- A_N = B_N + C_N ----------------------------------------------------------

/// (M_N, τ_N) ⊗ (M_N, tr_N): dimension N^2, trace weight 1/N.
TracialAlgebra chain_algebra(Index N);

/// A_N = Σ_n n η_n ⊗ e_{1,n}.
Operator build_A(Index N);

/// sup_n ||Y_n e|| / 2: the smallest admissible stand-in for μ_t given e.
double half_sup_norm(Index N, const Projection& e);

/// B_N = 2m (e ⊗ e_{11}) Σ_n U_n η_n ⊗ e_{1,n} with U_n = e Y_n / (2m).
/// Throws std::domain_error if some ||U_n|| > 1 + 1e-9 (m too small for e).
Operator build_B(Index N, const Projection& e, double m);

/// C_N = ((1 - e) ⊗ e_{11}) Σ_n n η_n ⊗ e_{1,n}.
Operator build_C(Index N, const Projection& e);

/// Largest ||U_n||_∞ over n for the given (e, m).
double max_contraction_norm(Index N, const Projection& e, double m);

/// The explicit constants of the L_p chain at exponent p < 1/2.
struct ChainConstants {
  double p;
  double c_p;      // 2^{-(1+2/p)}:           ||A_N||_p >= c_p N
  double C_p;      // (2/(1-2^{2p-1}))^{1/(2p)}: ||C_N||_p <= C_p t^{1/(2p)} N
  double t_prime;  // (c_p^p / (2 C_p^p))^2:  C_p^p t'^{1/2} = c_p^p / 2
  double delta;    // (c_p^p / 2)^{1/p} / 2
};

/// Throws std::invalid_argument unless 0 < p < 1/2.
ChainConstants chain_constants(double p);

struct CertifiedBound {
  ChainConstants constants;
  bool applies;  // t <= t'
  /// δ √N, a lower bound for μ_t((E_n X_N)_n) whenever `applies`.
  double at(Index N) const;
};

CertifiedBound certified_lower_bound(double p, double t);

struct ChainReport {
  Index N;
  double p;
  double t;
  double corank;  // τ(1 - e)
  double m;       // sup_n ||Y_n e|| / 2
  ChainConstants constants;

  double norm_A, norm_B, norm_C;  // L_p((M_N,τ_N) ⊗ (M_N,tr_N)) quasi-norms
  double bound_A;                 // c_p N
  double bound_B;                 // 2 m N^{1/2}
  double bound_C;                 // C_p t^{1/(2p)} N
  double triangle_lhs, triangle_rhs;
  double decomposition_error;  // max |A - B - C|
  double max_contraction;      // max_n ||U_n||
  bool certificate_applies;    // t <= t'
  double certified_m;          // δ N^{1/2}

  bool lower_A_ok, upper_B_ok, upper_C_ok, triangle_ok, implied_ok;
  bool decomposition_ok, contraction_ok;

  bool passed() const {
    return lower_A_ok && upper_B_ok && upper_C_ok && triangle_ok && implied_ok &&
           decomposition_ok && contraction_ok;
  }
};

/// Runs the full chain for one projection e with τ(1-e) <= t. Throws
/// std::invalid_argument on a corank violation or p outside (0, 1/2).
ChainReport chain_verify(Index N, double p, double t, const Projection& e);

// --- Truncated L_p element and the sign flip ---------------------------------

/// N!, throwing std::overflow_error past 20!.
Index factorial(Index n);

/// Terms N for which both the factor of size N! and the sign coordinate N!
/// are retained by `alg`.
std::vector<Index> admissible_terms(const TruncatedBigAlgebra& alg);

/// Σ_{N in terms} ε_{N!} N^{-2} X_{p,N!}, each summand acting on the factor of
/// size N! (identity on the other factors). Throws std::invalid_argument on a
/// missing factor or sign slot.
Operator build_truncated_Xp(const TruncatedBigAlgebra& alg, PExponent p,
                            const std::vector<Index>& terms);

/// π_k: the trace-preserving involution flipping sign coordinate k.
Operator sign_flip(const TruncatedBigAlgebra& alg, Index coordinate, const Operator& x);

struct FlipIdentityReport {
  Index N;
  std::vector<Index> terms;
  double identity_deviation;     // max |(2/N^2) X_{p,N!} - ε_{N!}(X - π_{N!}(X))|
  double commutation_deviation;  // max over levels of |π E_n(X) - E_n π(X)|
  double tol;
  bool identity_holds;
  bool commutes;
  bool holds() const { return identity_holds && commutes; }
};

/// Checks the flip identity for term N on the partial sum over `terms`, and
/// that π_{N!} commutes with every level E_0..E_{top} (on the partial sum and
/// on a random element).
FlipIdentityReport flip_identity_check(const TruncatedBigAlgebra& alg, PExponent p, Index N,
                                       const std::vector<Index>& terms, double tol = 1e-10);
/// Uses all admissible terms of the truncation.
FlipIdentityReport flip_identity_check(const TruncatedBigAlgebra& alg, PExponent p, Index N,
                                       double tol = 1e-10);

}  // namespace ncmart
