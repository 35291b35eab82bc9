#include "ncmart/sequence.hpp"

#include <stdexcept>
#include <type_traits>

namespace ncmart {

MartingaleSequence::MartingaleSequence(TracialAlgebra ambient, std::vector<Operator> terms,
                                       FiltrationDescriptor filtration)
    : ambient_(ambient), terms_(std::move(terms)), filtration_(std::move(filtration)) {
  if (terms_.empty()) throw std::invalid_argument("a sequence needs at least one term");
  for (const Operator& t : terms_)
    if (!(t.algebra() == ambient_))
      throw std::invalid_argument("sequence term lives outside the ambient algebra");
}

std::optional<std::string> MartingaleSequence::validate(double tol) const {
  auto expect = [&](Index level, const Operator& x) -> Operator {
    if (const auto* f = std::get_if<FactorFiltration>(&filtration_))
      return factor_cond_exp(FactorLevel(f->ambient, level), x);
    const auto& b = std::get<BigFiltration>(filtration_);
    return big_cond_exp(b.algebra, level, x);
  };
  if (std::holds_alternative<NoFiltration>(filtration_)) return std::nullopt;
  const Index first = std::visit(
      [](const auto& f) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, NoFiltration>)
          return 0;
        else
          return f.first_level;
      },
      filtration_);

  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const Index level = first + static_cast<Index>(k);
    const Operator& t = terms_[k];
    const double dev = (expect(level, t).matrix() - t.matrix()).cwiseAbs().maxCoeff();
    if (dev > tol)
      return "term " + std::to_string(k) + " is not measurable at level " + std::to_string(level);
    if (k + 1 < terms_.size()) {
      const double mdev =
          (expect(level, terms_[k + 1]).matrix() - t.matrix()).cwiseAbs().maxCoeff();
      if (mdev > tol)
        return "martingale property fails between terms " + std::to_string(k) + " and " +
               std::to_string(k + 1);
    }
  }
  return std::nullopt;
}

}  // namespace ncmart
