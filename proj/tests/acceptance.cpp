// Acceptance suite: one PASS/FAIL line per criterion. `acceptance` runs all
// twelve; `acceptance --only K` runs criterion K. Exit status is nonzero iff
// a selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "ncmart/cli.hpp"
#include "ncmart/counterexample.hpp"
#include "ncmart/ergodic.hpp"
#include "ncmart/random.hpp"
#include "ncmart/rearrangement.hpp"

using namespace ncmart;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::string fmt(double x) { return cli::format_double(x); }

Outcome tn_sandwich() {
  const auto t0 = std::chrono::steady_clock::now();
  int bad = 0, total = 0;
  for (Index n = 1; n <= 64; ++n)
    for (double p : {0.1, 0.25, 0.4, 0.49}) {
      ++total;
      if (!tn_bounds_check(n, p).holds) ++bad;
    }
  const double t2 = tn_bounds_check(2, 0.5).value;
  const double err = std::abs(t2 - (2.0 + std::sqrt(5.0)));
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << total - bad << "/" << total << " sandwiches hold; |T_2|_{1/2} - (2+sqrt5) = " << fmt(err)
     << "; runtime " << std::fixed << std::setprecision(2) << secs << " s";
  return {bad == 0 && err <= 1e-9 && secs < 10.0, os.str()};
}

Outcome normalizations() {
  double worst = 0.0;
  for (Index N : {2, 4, 8, 16, 64}) {
    worst = std::max(worst, std::abs(lp_norm(build_XN(N), 1.0) - 1.0));
    for (double p : {1.0, 1.2, 1.5, 1.9}) worst = std::max(worst, std::abs(lp_norm(build_XpN(p, N), p) - 1.0));
  }
  return {worst <= 1e-10, "max deviation " + fmt(worst)};
}

Outcome condexp_axioms() {
  int runs = 0, failed = 0;
  std::string first;
  for (Index N : {4, 8}) {
    const auto alg = TracialAlgebra::normalized(N);
    for (Index n = 1; n <= N; ++n) {
      const FactorLevel lvl(N, n);
      const CondExpReport r = check_condexp_axioms(
          [lvl](const Operator& x) { return factor_cond_exp(lvl, x); }, alg, 100,
          derive_seed(N, static_cast<std::uint64_t>(n)), 1e-8);
      ++runs;
      if (!r.passed()) {
        ++failed;
        if (first.empty()) first = "factor N=" + std::to_string(N) + " level " + std::to_string(n) + ": " + to_string(r.failures.front().axiom);
      }
    }
  }
  const TruncatedBigAlgebra big(2, {2, 6});
  OperatorSampler sample = [&big](Rng& rng) { return big.random_element(rng); };
  for (Index n = 0; n <= big.top_level(); ++n) {
    const CondExpReport r = check_condexp_axioms(
        [&big, n](const Operator& x) { return big_cond_exp(big, n, x); }, sample, 100,
        derive_seed(1000, static_cast<std::uint64_t>(n)), 1e-8);
    ++runs;
    if (!r.passed()) {
      ++failed;
      if (first.empty()) first = "big level " + std::to_string(n) + ": " + to_string(r.failures.front().axiom);
    }
  }
  return {failed == 0, std::to_string(runs - failed) + "/" + std::to_string(runs) +
                           " maps pass all axioms on 100 inputs" + (first.empty() ? "" : "; first failure " + first)};
}

Outcome mu_oracle() {
  const MuEstimate e = mu_diag_exhaustive(martingale_of_XN(4), 0.25);
  const double err = std::abs(e.value - 2.0 * std::sqrt(3.0));
  return {err <= 1e-9, "value " + fmt(e.value) + ", |value - 2 sqrt3| = " + fmt(err)};
}

Outcome chain_certificate() {
  int total = 0, bad = 0;
  double worst_decomp = 0.0, min_ratio = INFINITY;
  for (Index N : {4, 8, 16}) {
    const Index corank = corank_budget(N, 0.125);
    for (int k = 0; k < 50; ++k) {
      Rng rng(derive_seed(derive_seed(2024, static_cast<std::uint64_t>(N)), static_cast<std::uint64_t>(k)));
      const Projection e = random_projection(TracialAlgebra::normalized(N), corank, rng);
      const ChainReport r = chain_verify(N, 0.25, 0.125, e);
      ++total;
      const bool ok = r.passed() && r.norm_A >= static_cast<double>(N) / 512.0 &&
                      r.decomposition_error <= 1e-9;
      bad += !ok;
      worst_decomp = std::max(worst_decomp, r.decomposition_error);
      min_ratio = std::min(min_ratio, r.norm_A / (static_cast<double>(N) / 512.0));
    }
  }
  return {bad == 0, std::to_string(total - bad) + "/" + std::to_string(total) +
                        " projections pass; max |A-B-C| " + fmt(worst_decomp) +
                        "; min |A|_{1/4} / (N/2^9) " + fmt(min_ratio)};
}

Outcome growth() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Index> Ns{8, 16, 32, 64, 128};
  const GrowthReport g = growth_experiment(0.25, 0.1, Ns, 2000, 20240601);
  const double t_prime = chain_constants(0.25).t_prime;
  const GrowthReport small_t = growth_experiment(0.25, t_prime, Ns, 2000, 20240601);
  bool certified_ok = small_t.ordering_ok;
  for (const GrowthRow& r : small_t.rows)
    certified_ok = certified_ok && r.certificate_applies && r.certified <= r.searched;
  const bool slope_ok = g.slope >= 0.4 && g.slope <= 0.7;
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "searched";
  for (const GrowthRow& r : g.rows) os << " N=" << r.N << ":" << std::setprecision(5) << r.searched;
  os << "; slope " << fmt(g.slope) << " (target [0.4, 0.7])";
  std::vector<double> x, y;
  for (const GrowthRow& r : g.rows)
    if (r.corank > 0) {
      x.push_back(static_cast<double>(r.N));
      y.push_back(r.searched);
    }
  if (x.size() >= 2) os << "; informational slope over corank > 0 rows " << fmt(loglog_slope(x, y));
  os << "; certified <= searched at t' for every N: " << (certified_ok ? "yes" : "no");
  os << "; runtime " << std::fixed << std::setprecision(1) << secs << " s";
  return {slope_ok && certified_ok && g.ordering_ok && secs < 300.0, os.str()};
}

Outcome blow_up() {
  const ObstructionReport r = au_obstruction_report(1.0, 1e-3);
  bool increasing = true;
  for (std::size_t N = 5; N < r.rows.size(); ++N)
    increasing = increasing && r.rows[N].log_bound > r.rows[N - 1].log_bound;
  const double at10 = r.rows[9].bound;
  const double exact = r.delta * std::sqrt(3628800.0) / 100.0;
  const double quoted = r.delta * 19.0488;
  const bool value_ok = std::abs(at10 - exact) <= 1e-6 && std::abs(at10 - quoted) <= 1e-6;
  return {increasing && r.diverges && r.certificate_applies && value_ok,
          "strictly increasing from N=" + std::to_string(r.increasing_from) + ", bound(10) = " +
              fmt(at10) + ", delta*sqrt(10!)/100 = " + fmt(exact) + ", delta*19.0488 = " +
              fmt(quoted) + ", bound(100) = " + fmt(r.rows.back().bound)};
}

Outcome flip_identity() {
  const TruncatedBigAlgebra alg(2, {1, 2});
  const FlipIdentityReport r = flip_identity_check(alg, 1.0, 2, 1e-10);
  return {r.holds(), "identity deviation " + fmt(r.identity_deviation) + ", commutation deviation " +
                         fmt(r.commutation_deviation)};
}

Outcome ergodic_convex() {
  const TruncatedBigAlgebra alg(0, {4});
  const Operator x(alg.algebra(), build_XN(4).matrix());
  const MarkovOperator geo = convex_markov(geometric_alphas(4), alg);
  const MarkovInvariantReport inv = check_markov_invariants(geo, 100, 9, &alg);
  const SubsequenceReport sub = find_subsequence(geo, alg, x, 1.0, 0.05);
  const SubsequenceReport sep =
      find_subsequence(convex_markov(separated_alphas(4), alg), alg, x, 1.0, 0.05);
  std::ostringstream os;
  os << "geometric alphas: invariants " << (inv.holds() ? "hold" : "fail") << "; errors";
  for (const SubsequenceRow& r : sub.rows) os << " " << std::setprecision(3) << r.error << "@m=" << r.m;
  os << "; sum " << fmt(sub.error_sum) << " (needs <= 1)";
  os << "; informational: separated alphas give sum " << std::setprecision(4) << sep.error_sum;
  return {inv.holds() && sub.sum_at_most_one(), os.str()};
}

Outcome truncation_meet() {
  const auto alg = TracialAlgebra::normalized(6);
  Rng rng(606);
  std::vector<Operator> zs;
  for (int k = 0; k < 5; ++k) zs.push_back(1.3 * random_hermitian(alg, rng));
  const TruncationResult r = truncate_and_meet(zs, 0.2, 1.0);
  double max_norm = 0.0;
  for (const TruncationRow& row : r.report.rows) max_norm = std::max(max_norm, row.meet_norm);
  return {r.report.holds(), "tau(1-e) = " + fmt(r.report.meet_corank) + " <= " +
                                fmt(r.report.corank_sum) + "; max |Z_n e| = " + fmt(max_norm) +
                                " <= lambda = " + fmt(r.report.lambda) + "; Markov bounds " +
                                (r.report.markov_ok ? "hold" : "fail")};
}

Outcome unitary_averaging() {
  std::vector<Index> Ks;
  for (Index K = 2; K <= 1024; K *= 2) Ks.push_back(K);
  std::ostringstream os;
  bool ok = true;
  for (Index N : {2, 3}) {
    const UnitaryApproxReport r = unitary_approx_check(N, Ks, 1.0, 100, derive_seed(77, N));
    ok = ok && r.minimal_K.has_value();
    os << "N=" << N << " minimal K " << (r.minimal_K ? std::to_string(*r.minimal_K) : "none")
       << " (worst ratio " << std::setprecision(4) << r.rows.front().worst_ratio << "); ";
  }
  double worst = 0.0;
  Rng rng(78);
  for (Index N : {2, 3, 4}) {
    const Operator u = diagonal_unitary(N, 8);
    const Operator x = random_operator(u.algebra(), rng);
    for (long L = 1; L <= 64; ++L)
      worst = std::max(worst, max_abs(conj_average(unitary_phases(N, 8), x, L).matrix() -
                                      conj_average_explicit(u, x, L).matrix()));
  }
  os << "Dirichlet vs explicit conjugation, L <= 64: max deviation " << fmt(worst)
     << "; phase convention reciprocal";
  return {ok && worst <= 1e-10, os.str()};
}

Outcome determinism() {
  std::vector<cli::ExperimentConfig> cfgs(5);
  cfgs[0].command = "tn-bounds";
  cfgs[0].n_list = {1, 2, 3, 16};
  cfgs[1].command = "mu";
  cfgs[1].n_list = {8, 16, 32};
  cfgs[1].budget = 300;
  cfgs[1].seed = 17;
  cfgs[2].command = "chain";
  cfgs[2].trials = 10;
  cfgs[2].seed = 3;
  cfgs[3].command = "obstruction";
  cfgs[4].command = "ergodic";
  cfgs[4].trials = 30;
  int same = 0;
  std::string differs;
  for (const auto& base : cfgs) {
    for (const char* format : {"csv", "json"}) {
      cli::ExperimentConfig c = base;
      c.format = format;
      std::ostringstream a, b;
      omp_set_num_threads(1);
      cli::write(cli::run(c), a);
      omp_set_num_threads(3);
      cli::write(cli::run(c), b);
      omp_set_num_threads(1);
      if (a.str() == b.str() && !a.str().empty())
        ++same;
      else
        differs += " " + c.command + "/" + format;
    }
  }
  return {same == 10, std::to_string(same) + "/10 command/format pairs byte-identical across reruns (1 and 3 threads)" +
                          (differs.empty() ? "" : "; differing:" + differs)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);

  const std::vector<Criterion> all{
      {1, "T_n sandwich", tn_sandwich},
      {2, "normalizations", normalizations},
      {3, "conditional-expectation axioms", condexp_axioms},
      {4, "exact mu oracle", mu_oracle},
      {5, "chain certificate", chain_certificate},
      {6, "growth slope and certified ordering", growth},
      {7, "blow-up report", blow_up},
      {8, "sign-flip identity", flip_identity},
      {9, "ergodic convex construction", ergodic_convex},
      {10, "truncation and meet", truncation_meet},
      {11, "unitary averaging", unitary_averaging},
      {12, "determinism", determinism},
  };
  omp_set_num_threads(1);
  int failures = 0;
  for (const Criterion& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2d %s  %s | %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
