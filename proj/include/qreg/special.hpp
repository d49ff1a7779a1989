#ifndef QREG_SPECIAL_HPP
#define QREG_SPECIAL_HPP

namespace qreg {

// Natural log of the gamma function, Lanczos approximation (g=7, 9 terms).
// Relative error below 1e-13 for x > 0; reflection formula for x < 0.5.
double log_gamma(double x);

// log B(a, b) = log_gamma(a) + log_gamma(b) - log_gamma(a + b), a, b > 0.
double log_beta(double a, double b);

}  // namespace qreg

#endif
