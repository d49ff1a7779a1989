#ifndef QREG_SOLVER_HPP
#define QREG_SOLVER_HPP

#include <vector>

#include "qreg/design.hpp"
#include "qreg/penalty.hpp"

namespace qreg {

// Lambda-grid and convergence settings. lambda_min_ratio <= 0 selects the
// usual default: 0.001 when n > d, 0.05 otherwise.
struct PathConfig {
  int n_lambda = 100;
  double lambda_min_ratio = 0.0;
  double tol = 1e-7;     // max absolute coefficient change per sweep
  int max_iter = 10000;  // sweeps per lambda
  bool track_objective = false;

  double resolved_min_ratio(int n, int d) const {
    if (lambda_min_ratio > 0.0) return lambda_min_ratio;
    return n > d ? 1e-3 : 5e-2;
  }
  void validate() const;
};

struct FitReport {
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;
  // objective after each sweep, filled when PathConfig::track_objective
  std::vector<double> objective_trace;
};

struct SolutionPath {
  std::vector<double> lambdas;  // strictly decreasing
  std::vector<Coefficients> coefs;
  std::vector<FitReport> reports;

  int size() const { return static_cast<int>(lambdas.size()); }
};

// Smallest lambda whose solution has no active slopes:
// max_i |<x_i, y - ybar 1>| / n.
double lambda_max(const Design& design);

// Geometric grid from lambda_max(design) down to lambda_max * min_ratio,
// n_lambda points; the single point {0} when lambda_max is 0.
std::vector<double> lambda_grid(const Design& design,
                                const PathConfig& config);

// Objective on the per-observation scale of the reported lambda:
//   (1/2n) ||y - X theta||^2 + (1/n) rho_{n lambda}(theta).
// For the lasso this is exactly (1/2n)||y - X theta||^2 + lambda ||theta||_1
// over the slopes. Coordinate updates work on the summed-loss scale
// (Lambda = n lambda), where unit-norm columns make the one-dimensional
// subproblems (1/2)(theta - z)^2 + rho_Lambda(theta).
double objective_value(const Design& design, const Eigen::VectorXd& theta,
                       const PenaltySpec& spec, double lambda);

// Cyclic coordinate descent, intercept first then slopes 1..d. Stops when
// the largest coefficient change in a sweep drops below config.tol.
// Non-convergence is reported through the FitReport flag, never thrown.
Coefficients coordinate_descent(const Design& design, const PenaltySpec& spec,
                                double lambda, const Coefficients& init,
                                const PathConfig& config,
                                FitReport* report = nullptr);

// Warm-started geometric path from lambda_max down to
// lambda_max * lambda_min_ratio. Collapses to the single point 0 when the
// response carries no signal (lambda_max == 0).
SolutionPath solve_path(const Design& design, const PenaltySpec& spec,
                        const PathConfig& config = {});

}  // namespace qreg

#endif
