#ifndef QREG_QNORMAL_HPP
#define QREG_QNORMAL_HPP

#include <cstddef>
#include <vector>

#include "qreg/qfun.hpp"
#include "qreg/rng.hpp"

namespace qreg {

// q-normal distribution: density (1/Z_q) exp_q{ -((y-xi)/sigma)^2 / (3-q) }.
// q = 1 is Gaussian, q = 2 is Cauchy, q = 1 + 2/(nu+1) is Student-t(nu)
// scaled by sigma and shifted by xi. Immutable after construction.
class QNormal {
 public:
  QNormal(QIndex q_index, double location, double dispersion);

  QIndex q() const { return q_; }
  double xi() const { return xi_; }
  double sigma() const { return sigma_; }

  // Closed-form Z_q = sigma * sqrt(nu) * B(nu/2, 1/2) for q > 1 and
  // sigma * sqrt(2 pi) at the Gaussian limit.
  double normalizing_constant() const { return z_; }

  double density(double y) const;
  double log_density(double y) const;

  // sigma^2 (3-q)/(5-3q) for q < 5/3, +infinity otherwise.
  double variance() const;

 private:
  QIndex q_;
  double xi_;
  double sigma_;
  double z_;
  double log_z_;
};

// i.i.d. draws: xi + sigma * T_nu with T_nu = N / sqrt(chi^2_nu / nu)
// (plain normal at q = 1). Deterministic given the stream state.
std::vector<double> sample(const QNormal& dist, std::size_t count,
                           RngStream& rng);

}  // namespace qreg

#endif
