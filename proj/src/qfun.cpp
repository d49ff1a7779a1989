#include "qreg/qfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qreg {

QIndex::QIndex(double q) : q_(q) {
  if (!(q >= 1.0) || !(q < 3.0)) {
    throw std::domain_error("QIndex: q must satisfy 1 <= q < 3, got " +
                            std::to_string(q));
  }
  gaussian_ = (q - 1.0) < kGaussianTol;
}

double QIndex::nu() const {
  if (gaussian_) return std::numeric_limits<double>::infinity();
  return (3.0 - q_) / (q_ - 1.0);
}

double q_log(double u, QIndex q) {
  if (!(u > 0.0)) {
    throw std::domain_error("q_log: argument must be positive");
  }
  if (q.is_gaussian()) return std::log(u);
  const double one_minus_q = 1.0 - q.value();
  // expm1 keeps precision when u^(1-q) is close to 1
  return std::expm1(one_minus_q * std::log(u)) / one_minus_q;
}

double q_exp(double u, QIndex q) {
  if (q.is_gaussian()) return std::exp(u);
  const double one_minus_q = 1.0 - q.value();
  const double base = 1.0 + one_minus_q * u;
  if (base <= 0.0) return 0.0;
  return std::pow(base, 1.0 / one_minus_q);
}

}  // namespace qreg
