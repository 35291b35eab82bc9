#include "ncmart/counterexample.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncmart/random.hpp"

namespace ncmart {

namespace {

void require_positive(Index n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + " must be at least 1");
}

bool le_rel(double a, double b, double rel = 1e-9) { return a <= b + rel * std::abs(b) + 1e-300; }

}  // namespace

// ---------------------------------------------------------------------------
// X_N and its martingale

Operator build_eta(Index n, Index N) {
  require_positive(N, "N");
  if (n < 0 || n > N) throw std::out_of_range("eta index outside 0..N");
  Matrix m = Matrix::Zero(N, N);
  m.col(0).head(n).setOnes();
  return {TracialAlgebra::normalized(N), std::move(m)};
}

Operator build_xi(Index N) { return build_eta(N, N); }

Operator build_XN(Index N) {
  const Operator xi = build_xi(N);
  return xi * xi.adjoint();
}

Operator build_XpN(PExponent p, Index N) {
  if (p.is_infinite()) throw std::invalid_argument("X_{p,N} needs a finite exponent");
  const double scale = std::pow(static_cast<double>(N), 1.0 / p.value() - 1.0);
  return build_XN(N) * cplx(scale);
}

Operator martingale_Y(Index N, Index n) {
  const Operator eta = build_eta(n, N);
  return eta * eta.adjoint();
}

Operator martingale_D(Index N, Index n) {
  require_positive(N, "N");
  if (n < 0 || n > N) throw std::out_of_range("level outside 0..N");
  Matrix m = Matrix::Zero(N, N);
  for (Index k = n; k < N; ++k) m(k, k) = 1.0;
  return {TracialAlgebra::normalized(N), std::move(m)};
}

MartingaleSequence martingale_of_XN(Index N) {
  require_positive(N, "N");
  const Operator x = build_XN(N);
  std::vector<Operator> terms;
  terms.reserve(static_cast<std::size_t>(N));
  for (Index n = 1; n <= N; ++n) {
    Operator term = martingale_Y(N, n) + martingale_D(N, n);
    const Operator via_expectation = factor_cond_exp(FactorLevel(N, n), x);
    if ((term.matrix() - via_expectation.matrix()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::logic_error("closed form Y_n + D_n disagrees with E_n(X_N)");
    terms.push_back(std::move(term));
  }
  return {TracialAlgebra::normalized(N), std::move(terms), FactorFiltration{N, 1}};
}

// ---------------------------------------------------------------------------
// T_n

Operator build_Tn(Index n) {
  require_positive(n, "n");
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) m(i, j) = 1.0;
  return {TracialAlgebra::unnormalized(n), std::move(m)};
}

TnBoundsReport tn_bounds_check(Index n, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("T_n bounds need 0 < p < 1");
  const double nd = static_cast<double>(n);
  TnBoundsReport r{};
  r.n = n;
  r.p = p;
  r.lower = std::pow(nd / 2.0, 1.0 / p);
  r.upper = std::pow(2.0 * nd / (1.0 - std::pow(2.0, p - 1.0)), 1.0 / p);
  r.value = lp_norm(build_Tn(n), p);
  r.holds = le_rel(r.lower, r.value) && le_rel(r.value, r.upper);
  return r;
}

VkRecursionReport vk_recursion_check(int kmax, double p, Index dim_cap) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("v_k recursion needs 0 < p < 1");
  if (kmax < 0 || kmax > 30 || (Index{1} << kmax) > dim_cap)
    throw std::invalid_argument("2^kmax exceeds the dimension cap");
  VkRecursionReport r{};
  r.p = p;
  r.cap = 1.0 / (1.0 - std::pow(2.0, p - 1.0));
  for (int k = 0; k <= kmax; ++k) {
    const Index n = Index{1} << k;
    r.v.push_back(std::ldexp(lp_norm_power(build_Tn(n), p), -k));
  }
  r.v0_is_one = std::abs(r.v.front() - 1.0) <= 1e-12;
  r.recursion_holds = true;
  for (int k = 0; k < kmax; ++k) {
    const double inc = std::pow(2.0, k * (p - 1.0) - 1.0);
    r.increments.push_back(inc);
    if (!le_rel(r.v[static_cast<std::size_t>(k) + 1], r.v[static_cast<std::size_t>(k)] + inc))
      r.recursion_holds = false;
  }
  r.cap_holds = true;
  for (double v : r.v)
    if (!le_rel(v, r.cap)) r.cap_holds = false;
  return r;
}

// ---------------------------------------------------------------------------
// A_N = B_N + C_N

TracialAlgebra chain_algebra(Index N) {
  return tensor(TracialAlgebra::normalized(N), TracialAlgebra::unnormalized(N));
}

namespace {

Operator unit_1n(Index N, Index n) { return matrix_unit(TracialAlgebra::unnormalized(N), 1, n); }

Operator e11_tensor(const Operator& x, Index N) { return tensor(x, unit_1n(N, 1)); }

void require_projection_in(const Projection& e, Index N) {
  if (e.dim() != N) throw std::invalid_argument("projection must live in M_N");
}

}  // namespace

Operator build_A(Index N) {
  require_positive(N, "N");
  Operator a = Operator::zero(chain_algebra(N));
  for (Index n = 1; n <= N; ++n)
    a += tensor(build_eta(n, N), unit_1n(N, n)) * cplx(static_cast<double>(n));
  return a;
}

double half_sup_norm(Index N, const Projection& e) {
  require_projection_in(e, N);
  double sup = 0.0;
  for (Index n = 1; n <= N; ++n)
    sup = std::max(sup, op_norm(martingale_Y(N, n).matrix() * e.matrix()));
  return sup / 2.0;
}

double max_contraction_norm(Index N, const Projection& e, double m) {
  require_projection_in(e, N);
  double worst = 0.0;
  for (Index n = 1; n <= N; ++n) {
    const Matrix eyn = e.matrix() * martingale_Y(N, n).matrix();
    const double norm = op_norm(eyn);
    if (norm == 0.0) continue;
    if (!(m > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, norm / (2.0 * m));
  }
  return worst;
}

Operator build_B(Index N, const Projection& e, double m) {
  require_projection_in(e, N);
  if (max_contraction_norm(N, e, m) > 1.0 + 1e-9)
    throw std::domain_error("U_n = e Y_n / (2m) is not a contraction: m too small for e");
  Operator sum = Operator::zero(chain_algebra(N));
  if (m > 0.0) {
    const Operator e_op(TracialAlgebra::normalized(N), e.matrix());
    for (Index n = 1; n <= N; ++n) {
      const Operator u = e_op * martingale_Y(N, n) * cplx(1.0 / (2.0 * m));
      sum += tensor(u * build_eta(n, N), unit_1n(N, n));
    }
  }
  const Operator e_op(TracialAlgebra::normalized(N), e.matrix());
  return e11_tensor(e_op, N) * sum * cplx(2.0 * m);
}

Operator build_C(Index N, const Projection& e) {
  require_projection_in(e, N);
  const Operator comp(TracialAlgebra::normalized(N), e.complement().matrix());
  return e11_tensor(comp, N) * build_A(N);
}

ChainConstants chain_constants(double p) {
  if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("chain constants need 0 < p < 1/2");
  ChainConstants k{};
  k.p = p;
  k.c_p = std::pow(2.0, -(1.0 + 2.0 / p));
  k.C_p = std::pow(2.0 / (1.0 - std::pow(2.0, 2.0 * p - 1.0)), 1.0 / (2.0 * p));
  const double cpp = std::pow(k.c_p, p);
  const double Cpp = std::pow(k.C_p, p);
  k.t_prime = std::pow(cpp / (2.0 * Cpp), 2.0);
  k.delta = std::pow(cpp / 2.0, 1.0 / p) / 2.0;
  return k;
}

double CertifiedBound::at(Index N) const {
  return constants.delta * std::sqrt(static_cast<double>(N));
}

CertifiedBound certified_lower_bound(double p, double t) {
  const ChainConstants k = chain_constants(p);
  return {k, t <= k.t_prime};
}

ChainReport chain_verify(Index N, double p, double t, const Projection& e) {
  require_positive(N, "N");
  require_projection_in(e, N);
  ChainReport r{};
  r.constants = chain_constants(p);
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in [0,1]");
  r.corank = e.normalized_corank();
  if (r.corank > t + 1e-12) throw std::invalid_argument("projection corank exceeds t");
  r.N = N;
  r.p = p;
  r.t = t;
  const double Nd = static_cast<double>(N);

  r.m = half_sup_norm(N, e);
  r.max_contraction = max_contraction_norm(N, e, r.m);
  r.contraction_ok = r.max_contraction <= 1.0 + 1e-9;

  const Operator a = build_A(N);
  const Operator b = build_B(N, e, r.m);
  const Operator c = build_C(N, e);
  r.decomposition_error = (a.matrix() - b.matrix() - c.matrix()).cwiseAbs().maxCoeff();
  r.decomposition_ok = r.decomposition_error <= 1e-9;

  const double pa = lp_norm_power(a, p), pb = lp_norm_power(b, p), pc = lp_norm_power(c, p);
  r.norm_A = std::pow(pa, 1.0 / p);
  r.norm_B = pb > 0.0 ? std::pow(pb, 1.0 / p) : 0.0;
  r.norm_C = pc > 0.0 ? std::pow(pc, 1.0 / p) : 0.0;

  r.bound_A = r.constants.c_p * Nd;
  r.bound_B = 2.0 * r.m * std::sqrt(Nd);
  r.bound_C = r.constants.C_p * std::pow(t, 1.0 / (2.0 * p)) * Nd;
  r.lower_A_ok = le_rel(r.bound_A, r.norm_A);
  r.upper_B_ok = le_rel(r.norm_B, r.bound_B);
  r.upper_C_ok = le_rel(r.norm_C, r.bound_C);

  r.triangle_lhs = pa;
  r.triangle_rhs = pb + pc;
  r.triangle_ok = le_rel(pa, pb + pc);

  r.certificate_applies = t <= r.constants.t_prime;
  r.certified_m = r.constants.delta * std::sqrt(Nd);
  r.implied_ok = !r.certificate_applies || le_rel(r.certified_m, r.m);
  return r;
}

// ---------------------------------------------------------------------------
// Truncated L_p element

Index factorial(Index n) {
  if (n < 0) throw std::invalid_argument("factorial of a negative number");
  if (n > 20) throw std::overflow_error("factorial overflows 64 bits");
  Index f = 1;
  for (Index k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<Index> admissible_terms(const TruncatedBigAlgebra& alg) {
  std::vector<Index> out;
  for (Index N = 1; N <= 20; ++N) {
    const Index f = factorial(N);
    if (f > alg.sign_count() || alg.factor_slot(f) < 0) {
      if (f > alg.top_level()) break;
      continue;
    }
    out.push_back(N);
  }
  return out;
}

Operator build_truncated_Xp(const TruncatedBigAlgebra& alg, PExponent p,
                            const std::vector<Index>& terms) {
  Operator sum = Operator::zero(alg.algebra());
  for (Index N : terms) {
    require_positive(N, "term index");
    const Index f = factorial(N);
    const Index slot = alg.factor_slot(f);
    if (slot < 0)
      throw std::invalid_argument("factor of size " + std::to_string(f) + " missing from truncation");
    if (f > alg.sign_count())
      throw std::invalid_argument("sign coordinate " + std::to_string(f) + " missing from truncation");
    const Operator piece = alg.sign_operator(f) * alg.embed_factor(slot, build_XpN(p, f).matrix());
    sum += piece * cplx(1.0 / static_cast<double>(N * N));
  }
  return sum;
}

Operator sign_flip(const TruncatedBigAlgebra& alg, Index coordinate, const Operator& x) {
  if (coordinate < 1 || coordinate > alg.sign_count())
    throw std::invalid_argument("sign coordinate " + std::to_string(coordinate) + " not retained");
  if (x.dim() != alg.dim()) throw std::invalid_argument("operator is not in the truncated algebra");
  const Index b = alg.factor_dim();
  const Index mask = Index{1} << (alg.sign_count() - coordinate);
  Matrix out(x.dim(), x.dim());
  for (Index s = 0; s < alg.sign_dim(); ++s)
    for (Index r = 0; r < alg.sign_dim(); ++r)
      out.block(s * b, r * b, b, b) = x.matrix().block((s ^ mask) * b, (r ^ mask) * b, b, b);
  return {x.algebra(), std::move(out)};
}

FlipIdentityReport flip_identity_check(const TruncatedBigAlgebra& alg, PExponent p, Index N,
                                       const std::vector<Index>& terms, double tol) {
  FlipIdentityReport r{};
  r.N = N;
  r.terms = terms;
  r.tol = tol;
  const Index f = factorial(N);
  const Index slot = alg.factor_slot(f);
  if (slot < 0 || f > alg.sign_count())
    throw std::invalid_argument("term " + std::to_string(N) + " is not represented in the truncation");

  const Operator x = build_truncated_Xp(alg, p, terms);
  const Operator flipped = sign_flip(alg, f, x);
  const Operator rhs = alg.sign_operator(f) * (x - flipped);
  const Operator lhs =
      alg.embed_factor(slot, build_XpN(p, f).matrix()) * cplx(2.0 / static_cast<double>(N * N));
  r.identity_deviation = (lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff();
  r.identity_holds = r.identity_deviation <= tol;

  Rng rng(derive_seed(0x5eed, static_cast<std::uint64_t>(N)));
  const Operator y = alg.random_element(rng);
  double worst = 0.0;
  for (const Operator* z : {&x, &y})
    for (Index n = 0; n <= alg.top_level(); ++n) {
      const Matrix a = sign_flip(alg, f, big_cond_exp(alg, n, *z)).matrix();
      const Matrix b = big_cond_exp(alg, n, sign_flip(alg, f, *z)).matrix();
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  r.commutation_deviation = worst;
  r.commutes = worst <= tol;
  return r;
}

FlipIdentityReport flip_identity_check(const TruncatedBigAlgebra& alg, PExponent p, Index N,
                                       double tol) {
  return flip_identity_check(alg, p, N, admissible_terms(alg), tol);
}

}  // namespace ncmart
