#include "qreg/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace qreg {

void PathConfig::validate() const {
  if (n_lambda < 1 || tol <= 0.0 || max_iter < 1) {
    throw std::invalid_argument("PathConfig: positive fields required");
  }
  if (lambda_min_ratio > 0.0 && !(lambda_min_ratio < 1.0)) {
    throw std::invalid_argument("PathConfig: lambda_min_ratio must be < 1");
  }
}

double lambda_max(const Design& design) {
  const Eigen::VectorXd centered = design.y.array() - design.y_mean();
  double best = 0.0;
  for (int i = 1; i <= design.d(); ++i) {
    best = std::max(best, std::abs(design.X.col(i).dot(centered)));
  }
  return best / design.n();
}

double objective_value(const Design& design, const Eigen::VectorXd& theta,
                       const PenaltySpec& spec, double lambda) {
  const int n = design.n();
  const double rss = (design.y - design.X * theta).squaredNorm();
  return 0.5 * rss / n + penalty_value(theta, spec, n * lambda) / n;
}

Coefficients coordinate_descent(const Design& design, const PenaltySpec& spec,
                                double lambda, const Coefficients& init,
                                const PathConfig& config, FitReport* report) {
  spec.validate();
  config.validate();
  if (spec.kind == PenaltyKind::Mcp && !(spec.gamma > 1.0)) {
    throw std::invalid_argument(
        "coordinate_descent: MCP update requires gamma > 1");
  }
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("coordinate_descent: lambda must be >= 0");
  }
  const int n = design.n();
  const int d = design.d();
  if (init.theta.size() != d + 1) {
    throw std::invalid_argument("coordinate_descent: init size mismatch");
  }

  const double big_lambda = n * lambda;  // summed-loss scale
  Coefficients coefs = init;
  Eigen::VectorXd r = design.y - design.X * coefs.theta;

  FitReport rep;
  for (int it = 0; it < config.max_iter; ++it) {
    double max_change = 0.0;

    // unpenalized intercept: exact minimizer is theta0 + mean(r)
    const double shift = r.mean();
    if (shift != 0.0) {
      coefs.theta[0] += shift;
      r.array() -= shift;
      max_change = std::abs(shift);
    }

    for (int i = 1; i <= d; ++i) {
      const double old = coefs.theta[i];
      const double z = old + design.X.col(i).dot(r);
      const double updated = scalar_update(z, big_lambda, spec);
      if (updated != old) {
        r -= design.X.col(i) * (updated - old);
        coefs.theta[i] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }

    rep.iterations = it + 1;
    rep.last_change = max_change;
    if (config.track_objective) {
      rep.objective_trace.push_back(
          objective_value(design, coefs.theta, spec, lambda));
    }
    if (max_change < config.tol) {
      rep.converged = true;
      break;
    }
  }
  if (report) *report = std::move(rep);
  return coefs;
}

std::vector<double> lambda_grid(const Design& design,
                                const PathConfig& config) {
  config.validate();
  const double lmax = lambda_max(design);
  if (lmax <= 0.0) return {0.0};
  if (config.n_lambda == 1) return {lmax};
  std::vector<double> grid(config.n_lambda);
  const double ratio = config.resolved_min_ratio(design.n(), design.d());
  const double step =
      std::log(ratio) / static_cast<double>(config.n_lambda - 1);
  for (int k = 0; k < config.n_lambda; ++k) {
    grid[k] = lmax * std::exp(step * k);
  }
  return grid;
}

SolutionPath solve_path(const Design& design, const PenaltySpec& spec,
                        const PathConfig& config) {
  spec.validate();
  config.validate();

  SolutionPath path;
  path.lambdas = lambda_grid(design, config);

  Coefficients warm = Coefficients::zeros(design.d());
  for (double lambda : path.lambdas) {
    FitReport rep;
    warm = coordinate_descent(design, spec, lambda, warm, config, &rep);
    path.coefs.push_back(warm);
    path.reports.push_back(std::move(rep));
  }
  return path;
}

}  // namespace qreg
