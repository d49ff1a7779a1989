#ifndef QREG_QFUN_HPP
#define QREG_QFUN_HPP

namespace qreg {

// Entropic index. Construction is restricted to 1 <= q < 3, the range on
// which the q-normal family is a proper distribution on the whole real line.
class QIndex {
 public:
  // Values within kGaussianTol of 1 are treated as exactly Gaussian, which
  // avoids catastrophic cancellation in (u^(1-q) - 1)/(1-q) near the limit.
  static constexpr double kGaussianTol = 1e-9;

  explicit QIndex(double q);

  double value() const { return q_; }
  bool is_gaussian() const { return gaussian_; }

  // Student-t degrees of freedom nu = (3-q)/(q-1); +infinity at q = 1.
  double nu() const;

 private:
  double q_;
  bool gaussian_;
};

// q-logarithm: (u^(1-q) - 1)/(1-q), natural log at q = 1. Requires u > 0.
double q_log(double u, QIndex q);

// q-exponential: {1 + (1-q)u}^(1/(1-q)) where the base is positive, else 0;
// ordinary exponential at q = 1. Inverse of q_log on its range.
double q_exp(double u, QIndex q);

}  // namespace qreg

#endif
