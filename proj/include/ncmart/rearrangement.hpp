#pragma once

// μ_t^c((Y_n)) = inf_{τ(1-e) <= t} sup_n ||Y_n e|| as a computational object.
//
// Every search returns an upper bound together with a witness projection;
// the only lower bounds come from the analytic chain certificate. Parallel
// kernels (OpenMP) have serial reference twins in ncmart::serial that return
// bit-identical results.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/sequence.hpp"

namespace ncmart {

enum class MuDirection { upper_bound, certified_lower_bound };
enum class MuMethod { diag_exhaustive, grassmann_search, spectral_heuristic, analytic_certificate };

std::string to_string(MuDirection d);
std::string to_string(MuMethod m);

struct MuEstimate {
  double t = 0.0;
  double value = 0.0;
  bool infinite = false;
  std::optional<Projection> witness;  // present iff direction == upper_bound
  MuDirection direction = MuDirection::upper_bound;
  MuMethod method = MuMethod::diag_exhaustive;
  long iterations = 0;
  std::uint64_t seed = 0;
};

/// Largest admissible corank: floor(dim * t), never exceeding t.
Index corank_budget(Index dim, double t);

/// sup_n ||Y_n e||. Any e yields an upper bound on μ_t for t >= τ(1 - e).
double mu_eval(const MartingaleSequence& seq, const Projection& e);

/// Diagonal projection dropping the coordinates set in `dropped_mask`.
Projection diagonal_projection(const TracialAlgebra& alg, std::uint64_t dropped_mask);

/// Exact minimum of mu_eval over diagonal 0/1 projections of normalized
/// corank <= t. Throws std::invalid_argument above dimension 20.
MuEstimate mu_diag_exhaustive(const MartingaleSequence& seq, double t);

struct SearchOptions {
  long budget = 2000;  // objective evaluations
  std::uint64_t seed = 0;
};

/// Randomized minimization over projections of corank floor(dim t): heuristic
/// and random starts, then descent by plane rotations between the range and
/// its complement with a golden-section line search on the angle. Restarts
/// get budget/10 evaluations each. Deterministic for fixed (budget, seed).
MuEstimate mu_search(const MartingaleSequence& seq, double t, const SearchOptions& opts = {});

/// δ √N from the chain constants at exponent p_chain, as a certified lower
/// bound for μ_t((E_n X_N)_n) when t <= t'. Throws if the certificate does
/// not apply.
MuEstimate mu_certificate(Index N, double p_chain, double t);

struct GrowthRow {
  Index N;
  Index corank;
  double certified;  // δ √N
  bool certificate_applies;
  double searched;
  std::optional<double> diagonal;  // exhaustive diagonal value when N <= 20
  bool ordering_ok;
};

struct GrowthReport {
  double p_certificate;
  double t;
  long budget;
  std::uint64_t seed;
  std::vector<GrowthRow> rows;
  double slope;  // least-squares slope of log(searched) against log(N)
  bool ordering_ok;
};

/// μ_t((E_n X_N)_n) over a list of N: certified lower bound, searched upper
/// bound and (small N) the exhaustive diagonal value, with the log-log slope.
GrowthReport growth_experiment(double p_certificate, double t, const std::vector<Index>& Ns,
                               long budget, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ObstructionRow {
  Index N;
  double log_bound;  // log(δ (N!)^{1/p - 1/2} N^{-2})
  double bound;      // exp(log_bound), may be +inf
};

struct ObstructionReport {
  double p;
  double t;
  double p_chain;
  double delta;
  double exponent;  // 1/p - 1/2
  bool certificate_applies;
  std::vector<ObstructionRow> rows;
  Index increasing_from;  // bounds strictly increase from this N to N_max
  std::optional<Index> first_above_one;
  bool diverges;
  std::string conclusion;
};

/// Lower bounds δ (N!)^{1/p-1/2} N^{-2} for μ_{t/2} of the martingale of the
/// L_p element, N = 1..N_max, and the resulting obstruction to almost uniform
/// convergence. Throws std::invalid_argument unless 1 <= p < 2.
ObstructionReport au_obstruction_report(double p, double t, double p_chain = 0.25,
                                        Index N_max = 100);

namespace serial {

/// Serial reference twins of the OpenMP kernels.
double mu_eval(const MartingaleSequence& seq, const Projection& e);
MuEstimate mu_diag_exhaustive(const MartingaleSequence& seq, double t);
MuEstimate mu_search(const MartingaleSequence& seq, double t, const SearchOptions& opts = {});

}  // namespace serial

}  // namespace ncmart
