#include "qreg/qnormal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qreg/special.hpp"

namespace qreg {

namespace {

// B(nu/2, 1/2). For integer nu the exact recursion
// B(x+1, 1/2) = B(x, 1/2) * x / (x + 1/2) from B(1/2,1/2) = pi and
// B(1,1/2) = 2 stays within an ulp; otherwise fall back to log-gamma.
double beta_half(double nu) {
  const double rounded = std::round(nu);
  if (nu > 0.0 && nu <= 1000.0 &&
      std::abs(nu - rounded) <= 1e-12 * std::max(1.0, nu)) {
    const long k = static_cast<long>(rounded);
    double x = (k % 2 == 0) ? 1.0 : 0.5;
    double b = (k % 2 == 0) ? 2.0 : std::numbers::pi;
    while (x + 1.0 <= 0.5 * rounded + 1e-9) {
      b *= x / (x + 0.5);
      x += 1.0;
    }
    return b;
  }
  return std::exp(log_beta(0.5 * nu, 0.5));
}

}  // namespace

QNormal::QNormal(QIndex q_index, double location, double dispersion)
    : q_(q_index), xi_(location), sigma_(dispersion) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_) || !std::isfinite(xi_)) {
    throw std::domain_error("QNormal: requires finite xi and sigma > 0");
  }
  if (q_.is_gaussian()) {
    z_ = sigma_ * std::sqrt(2.0 * std::numbers::pi);
  } else {
    const double nu = q_.nu();
    z_ = sigma_ * std::sqrt(nu) * beta_half(nu);
  }
  log_z_ = std::log(z_);
}

double QNormal::log_density(double y) const {
  const double u = (y - xi_) / sigma_;
  if (q_.is_gaussian()) {
    return -log_z_ - 0.5 * u * u;
  }
  // exp_q{-u^2/(3-q)} = {1 + u^2/nu}^(1/(1-q)); log1p keeps small-u accuracy
  return -log_z_ + std::log1p(u * u / q_.nu()) / (1.0 - q_.value());
}

double QNormal::density(double y) const {
  const double u = (y - xi_) / sigma_;
  if (q_.is_gaussian()) {
    return std::exp(-0.5 * u * u) / z_;
  }
  const double base = 1.0 + u * u / q_.nu();
  return std::pow(base, 1.0 / (1.0 - q_.value())) / z_;
}

double QNormal::variance() const {
  const double qv = q_.value();
  if (qv >= 5.0 / 3.0) return std::numeric_limits<double>::infinity();
  return sigma_ * sigma_ * (3.0 - qv) / (5.0 - 3.0 * qv);
}

std::vector<double> sample(const QNormal& dist, std::size_t count,
                           RngStream& rng) {
  std::vector<double> out(count);
  const double nu = dist.q().nu();
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = dist.xi() + dist.sigma() * rng.student_t(nu);
  }
  return out;
}

}  // namespace qreg
