#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/condexp.hpp"

namespace ncmart {

/// Terms indexed by factor levels first_level, first_level+1, ... inside M_N.
struct FactorFiltration {
  Index ambient;
  Index first_level = 1;
};

/// Terms indexed by big-algebra levels first_level, first_level+1, ...
struct BigFiltration {
  TruncatedBigAlgebra algebra;
  Index first_level = 0;
};

/// No filtration attached: an arbitrary finite family (Y_n).
struct NoFiltration {};

using FiltrationDescriptor = std::variant<NoFiltration, FactorFiltration, BigFiltration>;

/// An ordered list of operators in one algebra, optionally adapted to a filtration.
class MartingaleSequence {
 public:
  MartingaleSequence(TracialAlgebra ambient, std::vector<Operator> terms,
                     FiltrationDescriptor filtration = NoFiltration{});

  const TracialAlgebra& ambient() const { return ambient_; }
  const std::vector<Operator>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  const Operator& operator[](std::size_t k) const { return terms_[k]; }
  const FiltrationDescriptor& filtration() const { return filtration_; }
  Index dim() const { return ambient_.dim(); }

  /// Checks that term k lies in the range of its level expectation and that
  /// the level-k expectation of term k+1 is term k. Returns a description of
  /// the first violation, or nothing. Sequences without a filtration pass.
  std::optional<std::string> validate(double tol = 1e-9) const;

 private:
  TracialAlgebra ambient_;
  std::vector<Operator> terms_;
  FiltrationDescriptor filtration_;
};

}  // namespace ncmart
