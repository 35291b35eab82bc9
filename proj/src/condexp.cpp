#include "ncmart/condexp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ncmart/schatten.hpp"

namespace ncmart {

FactorLevel::FactorLevel(Index ambient_, Index level_) : ambient(ambient_), level(level_) {
  if (ambient < 1 || level < 1 || level > ambient)
    throw std::out_of_range("filtration level " + std::to_string(level_) + " outside 1.." +
                            std::to_string(ambient_));
}

Matrix factor_cond_exp(Index level, const Matrix& x) {
  const Index n = x.rows();
  Matrix y = Matrix::Zero(n, n);
  const Index k = std::clamp<Index>(level, 0, n);
  y.topLeftCorner(k, k) = x.topLeftCorner(k, k);
  for (Index i = k; i < n; ++i) y(i, i) = x(i, i);
  return y;
}

Operator factor_cond_exp(const FactorLevel& lvl, const Operator& x) {
  if (x.dim() != lvl.ambient)
    throw std::invalid_argument("operator dimension does not match the filtration ambient size");
  return {x.algebra(), factor_cond_exp(lvl.level, x.matrix())};
}

// ---------------------------------------------------------------------------

TruncatedBigAlgebra::TruncatedBigAlgebra(Index sign_count, std::vector<Index> factors,
                                         Index dim_cap)
    : signs_(sign_count), factors_(std::move(factors)), factor_dim_(1) {
  if (signs_ < 0 || signs_ > 20) throw std::invalid_argument("sign count must be in 0..20");
  Index prev = 0;
  for (Index f : factors_) {
    if (f < 1) throw std::invalid_argument("factor sizes must be positive");
    if (f < prev) throw std::invalid_argument("factor sizes must be listed in ascending order");
    prev = f;
    if (factor_dim_ > dim_cap / f) throw std::length_error("truncated algebra exceeds dimension cap");
    factor_dim_ *= f;
  }
  if (factor_dim_ > dim_cap / sign_dim())
    throw std::length_error("truncated algebra exceeds dimension cap");
}

Index TruncatedBigAlgebra::top_level() const { return factors_.empty() ? 0 : factors_.back(); }

Index TruncatedBigAlgebra::factor_slot(Index size) const {
  for (std::size_t k = 0; k < factors_.size(); ++k)
    if (factors_[k] == size) return static_cast<Index>(k);
  return -1;
}

bool TruncatedBigAlgebra::contains(const Operator& x, double tol) const {
  if (x.dim() != dim()) return false;
  const Index b = factor_dim_;
  for (Index s = 0; s < sign_dim(); ++s)
    for (Index r = 0; r < sign_dim(); ++r) {
      if (s == r) continue;
      if (x.matrix().block(s * b, r * b, b, b).cwiseAbs().maxCoeff() > tol) return false;
    }
  return true;
}

Operator TruncatedBigAlgebra::sign_operator(Index k) const {
  if (k < 1 || k > signs_)
    throw std::out_of_range("sign coordinate " + std::to_string(k) + " not retained");
  Matrix m = Matrix::Zero(dim(), dim());
  const Index bit = signs_ - k;
  for (Index s = 0; s < sign_dim(); ++s) {
    const double v = ((s >> bit) & 1) ? -1.0 : 1.0;
    for (Index i = 0; i < factor_dim_; ++i) m(s * factor_dim_ + i, s * factor_dim_ + i) = v;
  }
  return {algebra(), std::move(m)};
}

Operator TruncatedBigAlgebra::embed_factor(Index slot, const Matrix& m) const {
  if (slot < 0 || slot >= static_cast<Index>(factors_.size()))
    throw std::out_of_range("factor slot out of range");
  const Index n = factors_[static_cast<std::size_t>(slot)];
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument("factor matrix has wrong size");
  Index outer = sign_dim();
  for (Index k = 0; k < slot; ++k) outer *= factors_[static_cast<std::size_t>(k)];
  Index inner = 1;
  for (std::size_t k = static_cast<std::size_t>(slot) + 1; k < factors_.size(); ++k) inner *= factors_[k];
  Matrix out = Matrix::Zero(dim(), dim());
  for (Index o = 0; o < outer; ++o)
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) {
        const cplx v = m(a, b);
        if (v == cplx(0.0)) continue;
        for (Index i = 0; i < inner; ++i) out((o * n + a) * inner + i, (o * n + b) * inner + i) = v;
      }
  return {algebra(), std::move(out)};
}

Operator TruncatedBigAlgebra::random_element(Rng& rng) const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Index s = 0; s < sign_dim(); ++s)
    m.block(s * factor_dim_, s * factor_dim_, factor_dim_, factor_dim_) =
        gaussian_matrix(factor_dim_, factor_dim_, rng);
  return {algebra(), std::move(m)};
}

Matrix apply_on_slot(const Matrix& x, const std::vector<Index>& dims, std::size_t slot,
                     const std::function<Matrix(const Matrix&)>& map) {
  if (slot >= dims.size()) throw std::out_of_range("tensor slot out of range");
  Index outer = 1, inner = 1;
  for (std::size_t k = 0; k < slot; ++k) outer *= dims[k];
  for (std::size_t k = slot + 1; k < dims.size(); ++k) inner *= dims[k];
  const Index n = dims[slot];
  if (x.rows() != outer * n * inner || x.cols() != x.rows())
    throw std::invalid_argument("matrix does not match tensor dimensions");

  Matrix out(x.rows(), x.cols());
  Matrix block(n, n);
  for (Index orow = 0; orow < outer; ++orow)
    for (Index ocol = 0; ocol < outer; ++ocol)
      for (Index irow = 0; irow < inner; ++irow)
        for (Index icol = 0; icol < inner; ++icol) {
          for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
              block(a, b) = x((orow * n + a) * inner + irow, (ocol * n + b) * inner + icol);
          const Matrix mapped = map(block);
          for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
              out((orow * n + a) * inner + irow, (ocol * n + b) * inner + icol) = mapped(a, b);
        }
  return out;
}

Operator big_cond_exp(const TruncatedBigAlgebra& alg, Index n, const Operator& x) {
  if (n < 0) throw std::out_of_range("filtration level must be non-negative");
  if (x.dim() != alg.dim()) throw std::invalid_argument("operator is not in the truncated algebra");

  std::vector<Index> dims{alg.sign_dim()};
  dims.insert(dims.end(), alg.factors().begin(), alg.factors().end());

  Matrix y = x.matrix();
  for (std::size_t k = 0; k < alg.factors().size(); ++k) {
    const Index size = alg.factors()[k];
    if (n == 0) {
      if (size == 1) continue;
      y = apply_on_slot(y, dims, k + 1, [size](const Matrix& b) -> Matrix {
        return (b.trace() / static_cast<double>(size)) * Matrix::Identity(size, size);
      });
    } else if (size > n) {
      y = apply_on_slot(y, dims, k + 1, [n](const Matrix& b) { return factor_cond_exp(n, b); });
    }
  }
  return {x.algebra(), std::move(y)};
}

// ---------------------------------------------------------------------------

std::string to_string(CondExpAxiom a) {
  switch (a) {
    case CondExpAxiom::trace_preservation: return "trace_preservation";
    case CondExpAxiom::unitality: return "unitality";
    case CondExpAxiom::idempotence: return "idempotence";
    case CondExpAxiom::positivity: return "positivity";
    case CondExpAxiom::self_adjointness: return "self_adjointness";
    case CondExpAxiom::bimodule: return "bimodule";
    case CondExpAxiom::contractivity_l1: return "contractivity_l1";
    case CondExpAxiom::contractivity_l2: return "contractivity_l2";
    case CondExpAxiom::contractivity_linf: return "contractivity_linf";
  }
  return "unknown";
}

bool CondExpReport::failed(CondExpAxiom a) const {
  return std::any_of(failures.begin(), failures.end(),
                     [a](const AxiomFailure& f) { return f.axiom == a; });
}

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

class FailureLog {
 public:
  explicit FailureLog(CondExpReport& r) : r_(r) {}

  void check(bool ok, CondExpAxiom axiom, int trial, double deviation, const char* what) {
    if (ok || r_.failed(axiom)) return;
    std::ostringstream os;
    os << what << " (trial " << trial << ", deviation " << deviation << ")";
    r_.failures.push_back({axiom, trial, deviation, os.str()});
  }

 private:
  CondExpReport& r_;
};

}  // namespace

CondExpReport check_condexp_axioms(const OperatorMap& e, const OperatorSampler& sample, int trials,
                                   std::uint64_t seed, double tol) {
  CondExpReport report;
  report.trials = trials;
  FailureLog log(report);
  Rng rng(seed);

  const Operator first = sample(rng);
  const TracialAlgebra alg = first.algebra();
  const Operator one = Operator::identity(alg);
  {
    const double dev = max_abs(e(one).matrix() - one.matrix());
    log.check(dev <= tol, CondExpAxiom::unitality, 0, dev, "E(1) != 1");
  }

  for (int t = 0; t < trials; ++t) {
    const Operator x = t == 0 ? first : sample(rng);
    const Operator ax = sample(rng);
    const Operator a = e(sample(rng));
    const Operator b = e(sample(rng));
    const double scale = std::max(1.0, op_norm(x.matrix()));

    const Operator ex = e(x);
    {
      const double dev = std::abs(trace(ex) - trace(x));
      log.check(dev <= tol * scale, CondExpAxiom::trace_preservation, t, dev, "tau(E X) != tau(X)");
    }
    {
      const double dev = max_abs(e(ex).matrix() - ex.matrix());
      log.check(dev <= tol * scale, CondExpAxiom::idempotence, t, dev, "E(E X) != E X");
    }
    {
      const Operator pos = ax.adjoint() * ax;
      const double s2 = std::max(1.0, op_norm(pos.matrix()));
      const Matrix epos = e(pos).matrix();
      const double herm = hermiticity_defect(epos);
      const double low = hermitian_eigenvalues(epos).minCoeff();
      const bool ok = herm <= tol * s2 && low >= -tol * s2;
      log.check(ok, CondExpAxiom::positivity, t, std::max(herm, -low), "E(A*A) not positive");
    }
    {
      const double dev = max_abs(e(x.adjoint()).matrix() - ex.matrix().adjoint());
      log.check(dev <= tol * scale, CondExpAxiom::self_adjointness, t, dev, "E(X*) != E(X)*");
    }
    {
      const double sa = std::max(1.0, op_norm(a.matrix()));
      const double sb = std::max(1.0, op_norm(b.matrix()));
      const double dev = max_abs(e(a * x * b).matrix() - (a * ex * b).matrix());
      log.check(dev <= tol * scale * sa * sb, CondExpAxiom::bimodule, t, dev,
                "E(aXb) != a E(X) b");
    }
    {
      const double l1 = lp_norm(ex, 1.0), r1 = lp_norm(x, 1.0);
      log.check(l1 <= r1 * (1.0 + tol) + tol, CondExpAxiom::contractivity_l1, t, l1 - r1,
                "||E X||_1 > ||X||_1");
      const double l2 = lp_norm(ex, 2.0), r2 = lp_norm(x, 2.0);
      log.check(l2 <= r2 * (1.0 + tol) + tol, CondExpAxiom::contractivity_l2, t, l2 - r2,
                "||E X||_2 > ||X||_2");
      const double li = op_norm(ex.matrix()), ri = op_norm(x.matrix());
      log.check(li <= ri * (1.0 + tol) + tol, CondExpAxiom::contractivity_linf, t, li - ri,
                "||E X||_inf > ||X||_inf");
    }
  }
  return report;
}

CondExpReport check_condexp_axioms(const OperatorMap& e, const TracialAlgebra& alg, int trials,
                                   std::uint64_t seed, double tol) {
  return check_condexp_axioms(
      e, [alg](Rng& rng) { return random_operator(alg, rng); }, trials, seed, tol);
}

}  // namespace ncmart
