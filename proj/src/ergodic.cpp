#include "ncmart/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ncmart/random.hpp"
#include "ncmart/rearrangement.hpp"
#include "ncmart/sequence.hpp"

namespace ncmart {

namespace {

Eigen::Map<const Vector> as_vec(const Matrix& m) { return {m.data(), m.size()}; }

Matrix from_vec(const Vector& v, Index d) { return Eigen::Map<const Matrix>(v.data(), d, d); }

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double co_trace(const Projection& e) {
  return static_cast<double>(e.corank()) * e.algebra().weight();
}

}  // namespace

Operator MarkovOperator::apply(const Operator& x) const {
  if (!(x.algebra() == algebra)) throw std::invalid_argument("operator outside the Markov domain");
  const Vector y = matrix * as_vec(x.matrix());
  return Operator(algebra, from_vec(y, algebra.dim()));
}

MarkovOperator markov_from_map(const TracialAlgebra& alg, const OperatorMap& map,
                               std::string description) {
  const Index d = alg.dim();
  if (d > kMarkovDimCap) throw std::length_error("Markov operator dimension above cap");
  MarkovOperator T{alg, Matrix::Zero(d * d, d * d), {}, std::move(description)};
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      T.matrix.col(i + j * d) = as_vec(map(Operator(alg, unit)).matrix());
    }
  }
  return T;
}

std::vector<double> geometric_alphas(Index levels) {
  std::vector<double> a;
  for (Index n = 0; n <= levels; ++n) a.push_back(1.0 - std::ldexp(1.0, -static_cast<int>(n)));
  return a;
}

std::vector<double> separated_alphas(Index levels, double ratio, double scale) {
  std::vector<double> a{0.0};
  for (Index k = 1; k <= levels; ++k)
    a.push_back(scale * std::pow(ratio, -static_cast<double>(levels - k)));
  return a;
}

MarkovOperator convex_markov(const std::vector<double>& alphas, const TruncatedBigAlgebra& alg) {
  if (alphas.size() < 2 || alphas.front() != 0.0)
    throw std::invalid_argument("alphas must start at 0 and have at least two entries");
  for (std::size_t k = 1; k < alphas.size(); ++k)
    if (!(alphas[k] > alphas[k - 1]))
      throw std::invalid_argument("alphas must be strictly increasing");
  if (alphas.back() > 1.0) throw std::invalid_argument("alphas must not exceed 1");

  const std::size_t L = alphas.size() - 1;
  const std::vector<double> a = alphas;
  auto map = [alg, a, L](const Operator& x) {
    Operator r = (1.0 - a[L]) * x;
    for (std::size_t n = 0; n < L; ++n)
      r += (a[n + 1] - a[n]) * big_cond_exp(alg, static_cast<Index>(n), x);
    return r;
  };
  MarkovOperator T = markov_from_map(alg.algebra(), map, "convex combination of E_n");
  T.alphas = alphas;
  return T;
}

bool MarkovInvariantReport::holds() const {
  return unital_deviation <= tol && trace_deviation <= tol && min_eigenvalue >= -tol &&
         commutation_deviation <= tol;
}

MarkovInvariantReport check_markov_invariants(const MarkovOperator& T, int trials,
                                              std::uint64_t seed, const TruncatedBigAlgebra* alg,
                                              double tol) {
  MarkovInvariantReport rep{0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0, tol};
  const Operator one = Operator::identity(T.algebra);
  rep.unital_deviation = max_abs(T.apply(one).matrix() - one.matrix());
  Rng rng(seed);
  for (int k = 0; k < trials; ++k) {
    const Operator x = random_operator(T.algebra, rng);
    const Operator tx = T.apply(x);
    rep.trace_deviation = std::max(rep.trace_deviation, std::abs(trace(tx) - trace(x)));
    const Operator pos = T.apply(x.adjoint() * x);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, hermitian_eigenvalues(pos.matrix()).minCoeff());
    if (alg) {
      for (Index n = 0; n <= alg->top_level(); ++n) {
        const Matrix lhs = T.apply(big_cond_exp(*alg, n, x)).matrix();
        const Matrix rhs = big_cond_exp(*alg, n, tx).matrix();
        rep.commutation_deviation = std::max(rep.commutation_deviation, max_abs(lhs - rhs));
      }
    }
  }
  return rep;
}

Operator ergodic_average(const MarkovOperator& T, const Operator& x, long n) {
  if (n < 1) throw std::invalid_argument("ergodic average needs n >= 1");
  Vector tk = as_vec(x.matrix());
  Vector sum = Vector::Zero(tk.size());
  for (long k = 0; k < n; ++k) {
    sum += tk;
    if (k + 1 < n) tk = T.matrix * tk;
  }
  sum /= static_cast<double>(n);
  return Operator(x.algebra(), from_vec(sum, x.dim()));
}

bool SubsequenceReport::all_hit() const {
  return std::all_of(rows.begin(), rows.end(), [](const SubsequenceRow& r) { return r.hit; });
}

SubsequenceReport find_subsequence(const MarkovOperator& T, const TruncatedBigAlgebra& alg,
                                   const Operator& x, PExponent p, double tol, long cap,
                                   double ratio) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (cap < 1 || !(ratio > 1.0)) throw std::invalid_argument("need cap >= 1 and ratio > 1");
  if (!(x.algebra() == T.algebra)) throw std::invalid_argument("operator outside the Markov domain");

  const Index top = alg.top_level();
  std::vector<Operator> targets;
  for (Index n = 0; n <= top; ++n) targets.push_back(big_cond_exp(alg, n, x));

  SubsequenceReport rep{p.value(), tol, cap, {}, 0.0};
  for (Index n = 0; n <= top; ++n)
    rep.rows.push_back({n, 0, std::numeric_limits<double>::infinity(), false});

  Vector tk = as_vec(x.matrix());
  Vector sum = Vector::Zero(tk.size());
  long checkpoint = 1;
  std::size_t open = rep.rows.size();
  for (long m = 1; m <= cap && open > 0; ++m) {
    sum += tk;
    tk = T.matrix * tk;
    if (m != checkpoint) continue;
    checkpoint = std::max(m + 1, static_cast<long>(static_cast<double>(m) * ratio));
    const Operator avg(x.algebra(), from_vec(sum / static_cast<double>(m), x.dim()));
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      SubsequenceRow& row = rep.rows[k];
      if (row.hit) continue;
      const double err = lp_norm(avg - targets[k], p);
      if (err < row.error) {
        row.error = err;
        row.m = m;
      }
      if (err <= tol) {
        row.hit = true;
        --open;
      }
    }
  }
  for (const SubsequenceRow& r : rep.rows) rep.error_sum += r.error;
  return rep;
}

TruncationResult truncate_and_meet(const std::vector<Operator>& zs, double t, double p) {
  if (zs.empty()) throw std::invalid_argument("truncate_and_meet needs at least one operator");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0,1)");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");

  const double lambda = std::pow(t, -1.0 / p);
  const double slack = 1e-10 * std::max(1.0, lambda);
  TruncationReport rep{t, p, lambda, {}, 0.0, 0.0, 0.0, true, true, true, true};
  std::vector<Projection> es;
  for (const Operator& z : zs) {
    Projection e = spectral_projection(abs_value(z), 0.0, lambda);
    TruncationRow row;
    row.corank = co_trace(e);
    row.markov_rhs = std::pow(lambda, -p) * lp_norm_power(z, PExponent(p));
    row.own_norm = op_norm((z * e.op()).matrix());
    rep.markov_ok = rep.markov_ok && row.corank <= row.markov_rhs + 1e-12;
    rep.own_norm_ok = rep.own_norm_ok && row.own_norm <= lambda + slack;
    rep.corank_sum += row.corank;
    rep.rows.push_back(row);
    es.push_back(std::move(e));
  }
  Projection e = projection_meet(es);
  rep.meet_corank = co_trace(e);
  rep.subadditive_ok = rep.meet_corank <= rep.corank_sum + 1e-12;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    rep.rows[k].meet_norm = op_norm((zs[k] * e.op()).matrix());
    rep.meet_norm_ok = rep.meet_norm_ok && rep.rows[k].meet_norm <= lambda + slack;
  }
  rep.mu_bound = mu_eval(MartingaleSequence(zs.front().algebra(), zs), e);
  return {std::move(e), rep};
}

std::string to_string(PhaseConvention c) {
  return c == PhaseConvention::reciprocal ? "reciprocal" : "shifted";
}

std::vector<double> unitary_phases(Index N, Index K, PhaseConvention c) {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (N < 1) throw std::invalid_argument("N must be positive");
  const double shift = c == PhaseConvention::shifted ? 1.0 : 0.0;
  std::vector<double> phi;
  for (Index k = 1; k <= N; ++k)
    phi.push_back(std::pow(static_cast<double>(K), -(static_cast<double>(N - k) + shift)));
  return phi;
}

Operator diagonal_unitary(Index N, Index K, PhaseConvention c) {
  const std::vector<double> phi = unitary_phases(N, K, c);
  Matrix u = Matrix::Zero(N, N);
  for (Index k = 0; k < N; ++k) u(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * phi[k]);
  return Operator(TracialAlgebra::normalized(N), u);
}

cplx dirichlet_factor(long double L, double delta) {
  if (!(L >= 1.0L)) throw std::invalid_argument("L must be at least 1");
  // Only Δ mod 1 matters; reduce to (-1/2, 1/2].
  long double d = static_cast<long double>(delta);
  d -= std::nearbyint(d);
  const long double pi = std::numbers::pi_v<long double>;
  const long double s = std::sin(pi * d);
  if (std::abs(s) < 1e-300L) return 1.0;
  // L Δ and (L-1) Δ matter only mod 2.
  const long double ld = std::fmod(L * d, 2.0L);
  const long double lm1 = std::fmod((L - 1.0L) * d, 2.0L);
  const long double mag = std::sin(pi * ld) / (L * s);
  return std::polar(static_cast<double>(mag), static_cast<double>(pi * lm1));
}

Operator conj_average(const std::vector<double>& phases, const Operator& x, long double L) {
  const Index d = x.dim();
  if (static_cast<Index>(phases.size()) != d) throw std::invalid_argument("phase count mismatch");
  Matrix y = x.matrix();
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      if (i != j) y(i, j) *= dirichlet_factor(L, phases[i] - phases[j]);
  return Operator(x.algebra(), y);
}

Operator conj_average(const Operator& u, const Operator& x, long double L) {
  std::vector<double> phases;
  for (Index k = 0; k < u.dim(); ++k) phases.push_back(std::arg(u(k, k)) / (2.0 * std::numbers::pi));
  return conj_average(phases, x, L);
}

Operator conj_average_explicit(const Operator& u, const Operator& x, long L) {
  if (L < 1) throw std::invalid_argument("L must be at least 1");
  Matrix acc = Matrix::Zero(x.dim(), x.dim());
  Matrix uj = Matrix::Identity(x.dim(), x.dim());
  for (long j = 0; j < L; ++j) {
    acc += uj * x.matrix() * uj.adjoint();
    uj = u.matrix() * uj;
  }
  return Operator(x.algebra(), acc / static_cast<double>(L));
}

namespace {

double approximation_lhs(Index N, Index K, const std::vector<double>& phi, const Operator& x,
                         PExponent p) {
  double total = 0.0;
  long double L = 1.0L;
  for (Index n = 0; n <= N; ++n) {
    const Matrix target = factor_cond_exp(N - n, x.matrix());
    const Operator avg = conj_average(phi, x, L);
    total += lp_norm(Operator(x.algebra(), target) - avg, p);
    L *= static_cast<long double>(K);
  }
  return total;
}

}  // namespace

UnitaryApproxReport unitary_approx_check(Index N, const std::vector<Index>& Ks, double p,
                                         int trials, std::uint64_t seed, PhaseConvention c) {
  if (Ks.empty()) throw std::invalid_argument("empty K range");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const TracialAlgebra alg = TracialAlgebra::normalized(N);
  const PExponent pe(p);

  std::vector<Operator> xs;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    xs.push_back(random_operator(alg, rng));
  }

  UnitaryApproxReport rep{N, p, trials, seed, c, {}, std::nullopt, 0.0, 0.0, 0.0,
                          std::ldexp(1.0, -static_cast<int>(N))};
  std::vector<Index> sorted = Ks;
  std::sort(sorted.begin(), sorted.end());
  for (Index K : sorted) {
    const std::vector<double> phi = unitary_phases(N, K, c);
    std::vector<double> ratio(xs.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(xs.size()); ++k) {
      const Operator& x = xs[static_cast<std::size_t>(k)];
      ratio[static_cast<std::size_t>(k)] = approximation_lhs(N, K, phi, x, pe) / lp_norm(x, pe);
    }
    UnitaryKRow row{K, *std::max_element(ratio.begin(), ratio.end()), false};
    row.holds = row.worst_ratio <= 1.0;
    if (row.holds && !rep.minimal_K) rep.minimal_K = K;
    rep.rows.push_back(row);
  }

  const Index K_last = sorted.back();
  const std::vector<double> phi = unitary_phases(N, K_last, c);
  rep.unit_lhs = approximation_lhs(N, K_last, phi, Operator::identity(alg), pe);
  const Operator u = diagonal_unitary(N, K_last, c);
  rep.u_minus_one = op_norm((u - Operator::identity(alg)).matrix());
  for (double f : phi)
    rep.u_minus_one_formula =
        std::max(rep.u_minus_one_formula, 2.0 * std::abs(std::sin(std::numbers::pi * f)));
  return rep;
}

}  // namespace ncmart
