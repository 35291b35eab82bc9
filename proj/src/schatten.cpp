#include "ncmart/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace ncmart {

PExponent::PExponent(double p) : p_(p) {
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
}

std::string PExponent::to_string() const {
  if (is_infinite()) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << p_;
  return os.str();
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.size() == 0) return {};
  Eigen::VectorXd s;
  if (a.rows() <= 16) {
    Eigen::JacobiSVD<Matrix> svd(a);
    s = svd.singularValues();
  } else {
    Eigen::BDCSVD<Matrix> svd(a);
    s = svd.singularValues();
  }
  std::vector<double> out(s.data(), s.data() + s.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  const double cut = out.empty() ? 0.0 : 1e-12 * out.front();
  for (double& v : out)
    if (v <= cut) v = 0.0;
  return out;
}

std::vector<double> singular_values(const Operator& a) { return singular_values(a.matrix()); }

double op_norm(const Matrix& a) {
  const std::vector<double> s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

double lp_norm_power(const Operator& a, PExponent p) {
  if (p.is_infinite()) throw std::invalid_argument("lp_norm_power needs a finite exponent");
  double sum = 0.0;
  for (double s : singular_values(a))
    if (s > 0.0) sum += std::pow(s, p.value());
  return a.algebra().weight() * sum;
}

double lp_norm(const Operator& a, PExponent p) {
  if (p.is_infinite()) return op_norm(a.matrix());
  const double power = lp_norm_power(a, p);
  return power > 0.0 ? std::pow(power, 1.0 / p.value()) : 0.0;
}

HolderCheck holder_split_bound(const Operator& a, const Operator& b, PExponent p, PExponent r,
                               PExponent q) {
  if (std::abs(p.reciprocal() - r.reciprocal() - q.reciprocal()) > 1e-12)
    throw std::invalid_argument("Hoelder exponents violate 1/p = 1/r + 1/q");
  const double lhs = lp_norm(a * b, p);
  const double rhs = lp_norm(a, r) * lp_norm(b, q);
  return {lhs, rhs, lhs <= rhs * (1.0 + 1e-9)};
}

}  // namespace ncmart
