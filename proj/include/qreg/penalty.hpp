#ifndef QREG_PENALTY_HPP
#define QREG_PENALTY_HPP

#include <Eigen/Dense>

namespace qreg {

enum class PenaltyKind { Lasso, Scad, Mcp };

// Penalty family with its shape parameter. Defaults follow the common
// choices a = 3.7 (SCAD) and gamma = 3 (MCP).
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::Lasso;
  double a = 3.7;      // SCAD shape, > 2
  double gamma = 3.0;  // MCP shape, > 0 (> 1 for the closed-form update)

  static PenaltySpec lasso() { return {PenaltyKind::Lasso}; }
  static PenaltySpec scad(double a = 3.7) {
    return {PenaltyKind::Scad, a, 3.0};
  }
  static PenaltySpec mcp(double gamma = 3.0) {
    return {PenaltyKind::Mcp, 3.7, gamma};
  }

  const char* name() const;
  void validate() const;  // construction-level bounds (a > 2, gamma > 0)
};

// rho_lambda(t) for a single coefficient.
double scalar_penalty(double t, const PenaltySpec& spec, double lambda);

// Penalty summed over slopes 1..d only; the intercept is never penalized.
double penalty_value(const Eigen::VectorXd& theta, const PenaltySpec& spec,
                     double lambda);

// Global minimizer of (1/2)(theta - z)^2 + rho_lambda(theta).
// Soft threshold for the lasso; the firm/clipped closed forms for MCP and
// SCAD, which are the global minimizers when gamma > 1 and a > 2 (the
// quadratic coefficient is 1 for unit-norm columns).
double scalar_update(double z, double lambda, const PenaltySpec& spec);

double soft_threshold(double z, double lambda);

}  // namespace qreg

#endif
