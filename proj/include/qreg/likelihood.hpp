#ifndef QREG_LIKELIHOOD_HPP
#define QREG_LIKELIHOOD_HPP

#include <vector>

#include "qreg/design.hpp"
#include "qreg/qfun.hpp"

namespace qreg {

// Likelihoods under the q-normal linear model with known dispersion
// (sigma = 1) and centred errors (xi = 0).

// Ordinary log-likelihood: sum_a log f_q(y^a - x^a theta | 0, 1).
double log_likelihood(const Design& design, const Eigen::VectorXd& theta,
                      QIndex q);

// L_q-likelihood by its definition, sum_a log_q f(y^a | theta), evaluated
// per observation through the log-density (robust when f underflows).
double lq_likelihood(const Design& design, const Eigen::VectorXd& theta,
                     QIndex q);

// Same quantity through the residual norm:
//   -(Z_q^(q-1)/(3-q)) ||y - X theta||^2 + n log_q(1/Z_q).
// Note log_q(1/Z) = -Z^(q-1) log_q(Z); the two differ for q != 1, and the
// elementwise sum pins down which constant is correct.
double lq_likelihood_closed_form(const Design& design,
                                 const Eigen::VectorXd& theta, QIndex q);

struct RankDeficiencyError : std::runtime_error {
  std::vector<int> columns;  // offending slope indices, 1-based
  explicit RankDeficiencyError(std::vector<int> cols);
};

// Maximum L_q-likelihood estimate. Under the q-normal linear model this is
// the ordinary least-squares solution for every q in [1, 3).
Coefficients mlqe(const Design& design, QIndex q);

enum class FitSource { PathEstimate, RestrictedMle };

// One candidate model: the estimate, its free-parameter count
// (|support| + 1 for the intercept), and both likelihoods at the estimate.
struct ModelFit {
  Coefficients theta_hat;
  int d_prime = 0;
  double log_lik = 0.0;
  double lq_lik = 0.0;
  FitSource source = FitSource::PathEstimate;
};

struct RestrictedMle {
  Coefficients theta;  // full-length, zeros off the support
  double log_lik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ascent_violation = false;  // IRLS step decreased the log-likelihood
};

// Maximum likelihood restricted to theta^j = 0 for j outside `support`,
// via iteratively reweighted least squares with weights
// w_a = 1 / (1 + r_a^2/nu), started at the OLS fit on the support. This is
// the EM iteration for the scale-mixture representation of the Student-t
// error, so the log-likelihood is non-decreasing across steps. Multi-start
// (3 jittered restarts) for q >= 2 where the likelihood can be multimodal.
// Non-convergence is a status, not an error.
RestrictedMle mle_restricted(const Design& design,
                             const std::vector<int>& support, QIndex q);

ModelFit make_model_fit(const Design& design, const Coefficients& coefs,
                        QIndex q, FitSource source);

}  // namespace qreg

#endif
