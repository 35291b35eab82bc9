#include "ncmart/rearrangement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "ncmart/counterexample.hpp"
#include "ncmart/random.hpp"
#include "ncmart/schatten.hpp"

namespace ncmart {

std::string to_string(MuDirection d) {
  return d == MuDirection::upper_bound ? "upper_bound" : "certified_lower_bound";
}

std::string to_string(MuMethod m) {
  switch (m) {
    case MuMethod::diag_exhaustive: return "diag_exhaustive";
    case MuMethod::grassmann_search: return "grassmann_search";
    case MuMethod::spectral_heuristic: return "spectral_heuristic";
    case MuMethod::analytic_certificate: return "analytic_certificate";
  }
  return "unknown";
}

Index corank_budget(Index dim, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  // The 1e-9 slack absorbs representation error in products like 10 * 0.1.
  const double raw = std::floor(static_cast<double>(dim) * t + 1e-9);
  return std::clamp<Index>(static_cast<Index>(raw), 0, dim);
}

namespace {

void require_t(double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in (0,1)");
}

void require_same_dim(const MartingaleSequence& seq, const Projection& e) {
  if (!(seq.ambient() == e.algebra()))
    throw std::invalid_argument("projection and sequence live in different algebras");
}

double term_norm_sq(const Matrix& y, const Matrix& e) {
  const Matrix ye = y * e;
  const Eigen::VectorXd ev = hermitian_eigenvalues(ye.adjoint() * ye);
  return std::max(ev.maxCoeff(), 0.0);
}

std::vector<Matrix> gram_matrices(const MartingaleSequence& seq) {
  std::vector<Matrix> grams;
  grams.reserve(seq.size());
  for (const Operator& y : seq.terms()) grams.push_back(y.matrix().adjoint() * y.matrix());
  return grams;
}

double mu_eval_impl(const MartingaleSequence& seq, const Projection& e, bool parallel) {
  require_same_dim(seq, e);
  const long n = static_cast<long>(seq.size());
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(dynamic) if (parallel)
  for (long k = 0; k < n; ++k)
    worst = std::max(worst, term_norm_sq(seq[static_cast<std::size_t>(k)].matrix(), e.matrix()));
  return std::sqrt(worst);
}

// ---------------------------------------------------------------------------
// Exhaustive diagonal search

struct MaskBest {
  double value_sq = std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;
  long evaluated = 0;

  void offer(double v, std::uint64_t m) {
    if (v < value_sq || (v == value_sq && m < mask)) {
      value_sq = v;
      mask = m;
    }
  }
};

// Max over terms of lambda_max(G[K,K]); abandons the mask as soon as a term
// exceeds `cutoff` (strictly), so tied masks are always fully evaluated.
double diagonal_objective(const std::vector<Matrix>& grams, const std::vector<Index>& kept,
                          double cutoff, bool& complete) {
  const Index r = static_cast<Index>(kept.size());
  double worst = 0.0;
  complete = true;
  if (r == 0) return 0.0;
  Matrix sub(r, r);
  for (const Matrix& g : grams) {
    for (Index a = 0; a < r; ++a)
      for (Index b = 0; b < r; ++b) sub(a, b) = g(kept[a], kept[b]);
    worst = std::max(worst, hermitian_eigenvalues(sub).maxCoeff());
    if (worst > cutoff) {
      complete = false;
      return worst;
    }
  }
  return worst;
}

MuEstimate diag_exhaustive_impl(const MartingaleSequence& seq, double t, bool parallel) {
  require_t(t);
  const Index d = seq.dim();
  if (d > 20) throw std::invalid_argument("exhaustive diagonal search is limited to dimension 20");
  const Index c = corank_budget(d, t);
  const std::vector<Matrix> grams = gram_matrices(seq);
  const long long total = 1LL << d;

  MaskBest global;
#pragma omp parallel if (parallel)
  {
    MaskBest local;
    std::vector<Index> kept;
    kept.reserve(static_cast<std::size_t>(d));
#pragma omp for schedule(dynamic, 64) nowait
    for (long long m = 0; m < total; ++m) {
      const auto mask = static_cast<std::uint64_t>(m);
      if (std::popcount(mask) != c) continue;
      kept.clear();
      for (Index i = 0; i < d; ++i)
        if (!((mask >> i) & 1U)) kept.push_back(i);
      bool complete = false;
      const double v = diagonal_objective(grams, kept, local.value_sq, complete);
      ++local.evaluated;
      if (complete) local.offer(v, mask);
    }
#pragma omp critical(ncmart_diag_merge)
    {
      global.offer(local.value_sq, local.mask);
      global.evaluated += local.evaluated;
    }
  }

  MuEstimate est;
  est.t = t;
  est.value = std::sqrt(std::max(global.value_sq, 0.0));
  est.witness = diagonal_projection(seq.ambient(), global.mask);
  est.direction = MuDirection::upper_bound;
  est.method = MuMethod::diag_exhaustive;
  est.iterations = global.evaluated;
  return est;
}

// ---------------------------------------------------------------------------
// Grassmann search

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

constexpr Index kExactDim = 24;  // dense eigensolves below this size, Lanczos above
constexpr int kLanczosSteps = 6;
constexpr int kGreedyLanczosSteps = 24;
constexpr int kRestarts = 10;

template <class S>
Mat<S> convert(const Matrix& m) {
  if constexpr (std::is_same_v<S, double>)
    return m.real();
  else
    return m;
}

template <class S>
Matrix to_complex(const Mat<S>& m) {
  if constexpr (std::is_same_v<S, double>)
    return m.template cast<cplx>();
  else
    return m;
}

template <class S>
Vec<S> gaussian_vector(Index d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec<S> v(d);
  for (Index i = 0; i < d; ++i) {
    if constexpr (std::is_same_v<S, double>) {
      v(i) = g(rng);
    } else {
      const double re = g(rng);
      const double im = g(rng);
      v(i) = S(re, im);
    }
  }
  return v;
}

template <class S>
Vec<S> project_out(const Mat<S>& q, Vec<S> x) {
  if (q.cols() > 0) x -= q * (q.adjoint() * x);
  return x;
}

template <class S>
struct TopPair {
  double value = 0.0;  // lambda_max of e G e
  Vec<S> vec;          // unit vector in range(e), may be empty when value == 0
};

template <class S>
TopPair<S> exact_top(const Mat<S>& g, const Mat<S>& q) {
  const Index d = g.rows();
  Mat<S> p = Mat<S>::Identity(d, d);
  if (q.cols() > 0) p -= q * q.adjoint();
  Mat<S> h = p * g * p;
  h = (0.5 * (h + h.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(h);
  TopPair<S> out;
  out.value = std::max(es.eigenvalues()(d - 1), 0.0);
  out.vec = es.eigenvectors().col(d - 1);
  return out;
}

// Lanczos with full reorthogonalization on e G e restricted to range(e).
template <class S>
TopPair<S> lanczos_top(const Mat<S>& g, const Mat<S>& q, const Vec<S>& start, int steps) {
  const Index d = g.rows();
  const int k_max = static_cast<int>(std::min<Index>(steps, d - q.cols()));
  TopPair<S> out;
  if (k_max <= 0) return out;
  Vec<S> v = project_out<S>(q, start);
  double nv = v.norm();
  if (nv == 0.0) return out;
  v /= nv;

  Mat<S> basis(d, k_max);
  std::vector<double> alpha, beta;
  int k = 0;
  for (; k < k_max; ++k) {
    basis.col(k) = v;
    Vec<S> w = project_out<S>(q, Vec<S>(g * v));
    const double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w);
    w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w);
    const double b = w.norm();
    if (k + 1 == k_max || b <= 1e-12 * (std::abs(a) + 1.0)) {
      ++k;
      break;
    }
    beta.push_back(b);
    v = w / b;
  }
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    tri(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  out.value = std::max(es.eigenvalues()(k - 1), 0.0);
  const Eigen::VectorXd s = es.eigenvectors().col(k - 1);
  out.vec = basis.leftCols(k) * s.template cast<S>();
  const double nrm = out.vec.norm();
  if (nrm > 0.0) out.vec /= nrm;
  return out;
}

template <class S>
struct Evaluation {
  double value_sq = 0.0;
  std::size_t arg = 0;
  std::vector<Vec<S>> vectors;  // per-term top vectors (Lanczos warm starts)
};

template <class S>
class SearchProblem {
 public:
  SearchProblem(const MartingaleSequence& seq, Index corank) : seq_(seq), corank_(corank) {
    for (const Operator& y : seq.terms()) {
      const Mat<S> m = convert<S>(y.matrix());
      grams_.push_back(m.adjoint() * m);
    }
    Rng rng(0x6a09e667f3bcc908ULL);
    jitter_ = 1e-3 * gaussian_vector<S>(dim(), rng).normalized();
    for (const Mat<S>& g : grams_) {
      Eigen::SelfAdjointEigenSolver<Mat<S>> es(g, Eigen::EigenvaluesOnly);
      norms_sq_.push_back(std::max(es.eigenvalues().maxCoeff(), 0.0));
    }
  }

  Index dim() const { return seq_.dim(); }
  Index corank() const { return corank_; }
  std::size_t terms() const { return grams_.size(); }
  const Mat<S>& gram(std::size_t k) const { return grams_[k]; }
  const std::vector<double>& norms_sq() const { return norms_sq_; }
  const MartingaleSequence& sequence() const { return seq_; }

  /// Approximate objective at complement frame q. `warm` supplies Lanczos
  /// start vectors (may be empty).
  Evaluation<S> evaluate(const Mat<S>& q, const std::vector<Vec<S>>* warm, int steps) const {
    Evaluation<S> ev;
    ev.vectors.resize(grams_.size());
    for (std::size_t k = 0; k < grams_.size(); ++k) {
      TopPair<S> tp;
      if (dim() <= kExactDim) {
        tp = exact_top<S>(grams_[k], q);
      } else {
        Vec<S> start = jitter_;
        if (warm && k < warm->size() && (*warm)[k].size() == dim()) start += (*warm)[k];
        else start += Vec<S>::Ones(dim()) / std::sqrt(static_cast<double>(dim()));
        tp = lanczos_top<S>(grams_[k], q, start, steps);
      }
      if (tp.value > ev.value_sq) {
        ev.value_sq = tp.value;
        ev.arg = k;
      }
      ev.vectors[k] = std::move(tp.vec);
    }
    return ev;
  }

  /// Exact sup_n ||Y_n e|| for e = 1 - q q*, with the cleaned witness.
  std::pair<double, Projection> exact(const Mat<S>& q) const {
    const Index d = dim();
    Matrix e = Matrix::Identity(d, d);
    if (q.cols() > 0) {
      const Matrix qc = to_complex<S>(q);
      e -= qc * qc.adjoint();
    }
    Projection proj = Projection::clean(Operator(seq_.ambient(), 0.5 * (e + e.adjoint())));
    return {serial::mu_eval(seq_, proj), std::move(proj)};
  }

 private:
  const MartingaleSequence& seq_;
  Index corank_;
  std::vector<Mat<S>> grams_;
  std::vector<double> norms_sq_;
  Vec<S> jitter_;
};

template <class S>
Mat<S> orthonormalize(const Mat<S>& x) {
  if (x.cols() == 0) return x;
  Eigen::HouseholderQR<Mat<S>> qr(x);
  return qr.householderQ() * Mat<S>::Identity(x.rows(), x.cols());
}

template <class S>
Mat<S> unit_columns(Index d, const std::vector<Index>& idx) {
  Mat<S> q = Mat<S>::Zero(d, static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) q(idx[c], static_cast<Index>(c)) = S(1.0);
  return q;
}

// Greedy deflation: repeatedly remove the top right singular direction of the
// currently worst term.
template <class S>
Mat<S> greedy_start(const SearchProblem<S>& prob, long& evals) {
  const Index d = prob.dim();
  Mat<S> q(d, 0);
  std::vector<Vec<S>> warm;
  for (Index j = 0; j < prob.corank(); ++j) {
    Evaluation<S> ev = prob.evaluate(q, &warm, kGreedyLanczosSteps);
    ++evals;
    Vec<S> v = ev.vectors[ev.arg];
    if (v.size() != d || v.norm() == 0.0) v = Vec<S>::Ones(d);
    v = project_out<S>(q, v);
    if (v.norm() < 1e-10) {
      Rng rng(derive_seed(0xdef1a7e, static_cast<std::uint64_t>(j)));
      v = project_out<S>(q, gaussian_vector<S>(d, rng));
    }
    v = project_out<S>(q, v);  // second pass for orthogonality
    q.conservativeResize(d, j + 1);
    q.col(j) = v.normalized();
    warm = std::move(ev.vectors);
  }
  return q;
}

template <class S>
Mat<S> diagonal_start(const SearchProblem<S>& prob) {
  const Index d = prob.dim();
  const Index c = prob.corank();
  std::vector<Index> dropped;
  if (d <= 20) {
    const MuEstimate best = serial::mu_diag_exhaustive(prob.sequence(),
                                                       static_cast<double>(c) / static_cast<double>(d));
    const Matrix& w = best.witness->matrix();
    for (Index i = 0; i < d; ++i)
      if (std::abs(w(i, i)) < 0.5) dropped.push_back(i);
  } else {
    // Drop the coordinates with the heaviest columns across all terms.
    std::vector<std::pair<double, Index>> weight;
    for (Index i = 0; i < d; ++i) {
      double w = 0.0;
      for (std::size_t k = 0; k < prob.terms(); ++k) w = std::max(w, std::real(prob.gram(k)(i, i)));
      weight.emplace_back(-w, i);
    }
    std::sort(weight.begin(), weight.end());
    for (Index j = 0; j < c; ++j) dropped.push_back(weight[static_cast<std::size_t>(j)].second);
  }
  return unit_columns<S>(d, dropped);
}

template <class S>
Mat<S> spectral_start(const SearchProblem<S>& prob, std::size_t term) {
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(prob.gram(term));
  return es.eigenvectors().rightCols(prob.corank());
}

template <class S>
Mat<S> rotate(const Mat<S>& q, const Vec<S>& v, const Vec<S>& w, const Vec<S>& b, double theta) {
  // Plane rotation in span(v, w) with v ⊥ range(q), w = q b, |v| = |b| = 1.
  return q + ((std::cos(theta) - 1.0) * w + std::sin(theta) * v) * b.adjoint();
}

struct RestartResult {
  double value = std::numeric_limits<double>::infinity();
  std::optional<Projection> witness;
  long evals = 0;
};

template <class S>
RestartResult run_restart(const SearchProblem<S>& prob, int index, long budget,
                          std::uint64_t seed, const std::vector<std::size_t>& term_order) {
  const Index d = prob.dim();
  const Index c = prob.corank();
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  long evals = 0;

  Mat<S> q;
  if (index == 0) {
    q = greedy_start<S>(prob, evals);
  } else if (index == 1) {
    q = diagonal_start<S>(prob);
  } else if (index <= 4 && static_cast<std::size_t>(index - 2) < term_order.size()) {
    q = spectral_start<S>(prob, term_order[static_cast<std::size_t>(index - 2)]);
  } else {
    Mat<S> g(d, c);
    for (Index j = 0; j < c; ++j) g.col(j) = gaussian_vector<S>(d, rng);
    q = orthonormalize<S>(g);
  }
  q = orthonormalize<S>(q);

  RestartResult result;
  {
    auto [value, proj] = prob.exact(q);
    result.value = value;
    result.witness = std::move(proj);
  }

  Evaluation<S> cur = prob.evaluate(q, nullptr, kLanczosSteps);
  ++evals;
  int move = 0;
  int accepted = 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  while (evals < budget) {
    // Direction to rotate out of the range: the worst term's top direction on
    // even moves, a random range direction on odd ones.
    Vec<S> v;
    if (move % 2 == 0 && cur.vectors[cur.arg].size() == d) v = cur.vectors[cur.arg];
    else v = gaussian_vector<S>(d, rng);
    ++move;
    v = project_out<S>(q, project_out<S>(q, v));
    if (v.norm() < 1e-10) continue;
    v.normalize();
    Vec<S> b = gaussian_vector<S>(c, rng).normalized();
    const Vec<S> w = q * b;

    auto phi = [&](double theta, Evaluation<S>& out) {
      out = prob.evaluate(rotate<S>(q, v, w, b, theta), &cur.vectors, kLanczosSteps);
      ++evals;
      return out.value_sq;
    };

    double best_theta = 0.0;
    double best_val = cur.value_sq;
    Evaluation<S> best_eval;
    Evaluation<S> tmp;
    const double grid[] = {-1.2, -0.6, -0.25, 0.25, 0.6, 1.2};
    for (double th : grid) {
      if (evals >= budget) break;
      const double val = phi(th, tmp);
      if (val < best_val) {
        best_val = val;
        best_theta = th;
        best_eval = tmp;
      }
    }
    if (best_theta == 0.0) {
      for (double th : {-0.06, 0.06}) {
        if (evals >= budget) break;
        const double val = phi(th, tmp);
        if (val < best_val) {
          best_val = val;
          best_theta = th;
          best_eval = tmp;
        }
      }
    }
    if (best_theta != 0.0) {
      // Golden-section refinement in a bracket around the best grid angle.
      const double half = std::abs(best_theta) < 0.1 ? 0.05 : (std::abs(best_theta) < 0.3 ? 0.18 : 0.35);
      double lo = best_theta - half, hi = best_theta + half;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      Evaluation<S> e1, e2;
      if (evals + 2 <= budget) {
        double f1 = phi(x1, e1), f2 = phi(x2, e2);
        for (int it = 0; it < 5 && evals < budget; ++it) {
          if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            e2 = e1;
            x1 = hi - gr * (hi - lo);
            f1 = phi(x1, e1);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            e1 = e2;
            x2 = lo + gr * (hi - lo);
            f2 = phi(x2, e2);
          }
        }
        if (f1 < best_val) {
          best_val = f1;
          best_theta = x1;
          best_eval = e1;
        }
        if (f2 < best_val) {
          best_val = f2;
          best_theta = x2;
          best_eval = e2;
        }
      }
      if (best_val < cur.value_sq * (1.0 - 1e-12)) {
        q = rotate<S>(q, v, w, b, best_theta);
        if (++accepted % 16 == 0) q = orthonormalize<S>(q);
        cur = std::move(best_eval);
      }
    }
  }

  auto [value, proj] = prob.exact(orthonormalize<S>(q));
  if (value < result.value) {
    result.value = value;
    result.witness = std::move(proj);
  }
  result.evals = evals;
  return result;
}

template <class S>
MuEstimate search_impl(const MartingaleSequence& seq, double t, const SearchOptions& opts,
                       bool parallel) {
  const Index d = seq.dim();
  const Index c = corank_budget(d, t);
  MuEstimate est;
  est.t = t;
  est.seed = opts.seed;
  est.direction = MuDirection::upper_bound;
  est.method = MuMethod::grassmann_search;
  if (c == 0 || c >= d) {
    const Projection e = c == 0 ? Projection::identity(seq.ambient()) : Projection::zero(seq.ambient());
    est.value = serial::mu_eval(seq, e);
    est.witness = e;
    est.iterations = 1;
    return est;
  }

  const SearchProblem<S> prob(seq, c);
  std::vector<std::size_t> order(prob.terms());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prob.norms_sq()[a] > prob.norms_sq()[b];
  });

  const long budget = std::max<long>(opts.budget, 1);
  const int restarts = static_cast<int>(std::min<long>(kRestarts, budget));
  const long per_restart = std::max<long>(budget / restarts, 1);
  std::vector<RestartResult> results(static_cast<std::size_t>(restarts));

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int r = 0; r < restarts; ++r)
    results[static_cast<std::size_t>(r)] = run_restart<S>(prob, r, per_restart, opts.seed, order);

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].value < results[best].value) best = r;
  est.value = results[best].value;
  est.witness = results[best].witness;
  est.iterations = 0;
  for (const RestartResult& r : results) est.iterations += r.evals;
  return est;
}

bool is_real(const MartingaleSequence& seq) {
  for (const Operator& y : seq.terms())
    if (y.matrix().imag().cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

MuEstimate mu_search_impl(const MartingaleSequence& seq, double t, const SearchOptions& opts,
                          bool parallel) {
  require_t(t);
  return is_real(seq) ? search_impl<double>(seq, t, opts, parallel)
                      : search_impl<cplx>(seq, t, opts, parallel);
}

}  // namespace

// ---------------------------------------------------------------------------

Projection diagonal_projection(const TracialAlgebra& alg, std::uint64_t dropped_mask) {
  Matrix m = Matrix::Identity(alg.dim(), alg.dim());
  for (Index i = 0; i < alg.dim() && i < 64; ++i)
    if ((dropped_mask >> i) & 1U) m(i, i) = 0.0;
  return Projection::from_operator(Operator(alg, std::move(m)));
}

double mu_eval(const MartingaleSequence& seq, const Projection& e) {
  return mu_eval_impl(seq, e, true);
}

MuEstimate mu_diag_exhaustive(const MartingaleSequence& seq, double t) {
  return diag_exhaustive_impl(seq, t, true);
}

MuEstimate mu_search(const MartingaleSequence& seq, double t, const SearchOptions& opts) {
  return mu_search_impl(seq, t, opts, true);
}

namespace serial {

double mu_eval(const MartingaleSequence& seq, const Projection& e) {
  return mu_eval_impl(seq, e, false);
}

MuEstimate mu_diag_exhaustive(const MartingaleSequence& seq, double t) {
  return diag_exhaustive_impl(seq, t, false);
}

MuEstimate mu_search(const MartingaleSequence& seq, double t, const SearchOptions& opts) {
  return mu_search_impl(seq, t, opts, false);
}

}  // namespace serial

MuEstimate mu_certificate(Index N, double p_chain, double t) {
  const CertifiedBound cb = certified_lower_bound(p_chain, t);
  if (!cb.applies)
    throw std::invalid_argument("t exceeds t' for this exponent; no certified lower bound");
  MuEstimate est;
  est.t = t;
  est.value = cb.at(N);
  est.direction = MuDirection::certified_lower_bound;
  est.method = MuMethod::analytic_certificate;
  return est;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs at least two matching points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

GrowthReport growth_experiment(double p_certificate, double t, const std::vector<Index>& Ns,
                               long budget, std::uint64_t seed) {
  GrowthReport rep;
  rep.p_certificate = p_certificate;
  rep.t = t;
  rep.budget = budget;
  rep.seed = seed;
  rep.ordering_ok = true;
  const CertifiedBound cb = certified_lower_bound(p_certificate, t);

  std::vector<double> xs, ys;
  for (Index N : Ns) {
    const MartingaleSequence seq = martingale_of_XN(N);
    GrowthRow row{};
    row.N = N;
    row.corank = corank_budget(N, t);
    row.certified = cb.at(N);
    row.certificate_applies = cb.applies;
    row.searched =
        mu_search(seq, t, {budget, derive_seed(seed, static_cast<std::uint64_t>(N))}).value;
    if (N <= 20) row.diagonal = mu_diag_exhaustive(seq, t).value;
    const bool lower_ok = !row.certificate_applies || row.certified <= row.searched * (1.0 + 1e-12);
    const bool upper_ok = !row.diagonal || row.searched <= *row.diagonal + 1e-9;
    row.ordering_ok = lower_ok && upper_ok;
    rep.ordering_ok = rep.ordering_ok && row.ordering_ok;
    xs.push_back(static_cast<double>(N));
    ys.push_back(row.searched);
    rep.rows.push_back(*std::make_optional(row));
  }
  rep.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

ObstructionReport au_obstruction_report(double p, double t, double p_chain, Index N_max) {
  if (p >= 2.0)
    throw std::invalid_argument(
        "p >= 2: the growth exponent 1/p - 1/2 is <= 0, so the lower bounds do not diverge "
        "(almost uniform convergence does hold for p >= 2)");
  if (!(p >= 1.0)) throw std::invalid_argument("the obstruction report needs 1 <= p < 2");
  if (N_max < 2) throw std::invalid_argument("N_max must be at least 2");
  const CertifiedBound cb = certified_lower_bound(p_chain, t);

  ObstructionReport rep;
  rep.p = p;
  rep.t = t;
  rep.p_chain = p_chain;
  rep.delta = cb.constants.delta;
  rep.exponent = 1.0 / p - 0.5;
  rep.certificate_applies = cb.applies;
  const double log_delta = std::log(rep.delta);
  for (Index N = 1; N <= N_max; ++N) {
    const double Nd = static_cast<double>(N);
    const double lb = log_delta + rep.exponent * std::lgamma(Nd + 1.0) - 2.0 * std::log(Nd);
    rep.rows.push_back({N, lb, std::exp(lb)});
    if (!rep.first_above_one && lb > 0.0) rep.first_above_one = N;
  }
  Index from = N_max;
  while (from > 1 && rep.rows[static_cast<std::size_t>(from - 1)].log_bound >
                         rep.rows[static_cast<std::size_t>(from - 2)].log_bound)
    --from;
  rep.increasing_from = from;
  // log b(N+1) - log b(N) = a log(N+1) - 2 log((N+1)/N), which tends to +inf
  // for a > 0; an increasing tail therefore keeps increasing.
  rep.diverges = rep.exponent > 0.0 && from < N_max;

  std::ostringstream os;
  if (!rep.certificate_applies) {
    os << "t = " << t << " exceeds t' = " << cb.constants.t_prime
       << "; the chain certificate does not apply and no conclusion is drawn";
  } else if (rep.diverges) {
    os << "lower bounds for mu_{t/2} of the martingale of X_p increase without bound from N = "
       << from << " (log bound " << rep.rows.back().log_bound << " at N = " << N_max
       << "), so mu_{t/2} = inf and the martingale does not converge almost uniformly";
  } else {
    os << "no divergence detected up to N = " << N_max;
  }
  rep.conclusion = os.str();
  return rep;
}

}  // namespace ncmart
