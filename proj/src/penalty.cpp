#include "qreg/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace qreg {

const char* PenaltySpec::name() const {
  switch (kind) {
    case PenaltyKind::Lasso: return "lasso";
    case PenaltyKind::Scad: return "scad";
    case PenaltyKind::Mcp: return "mcp";
  }
  return "?";
}

void PenaltySpec::validate() const {
  if (kind == PenaltyKind::Scad && !(a > 2.0)) {
    throw std::invalid_argument("PenaltySpec: SCAD requires a > 2");
  }
  if (kind == PenaltyKind::Mcp && !(gamma > 0.0)) {
    throw std::invalid_argument("PenaltySpec: MCP requires gamma > 0");
  }
}

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

double scalar_penalty(double t, const PenaltySpec& spec, double lambda) {
  t = std::abs(t);
  if (lambda == 0.0) return 0.0;
  switch (spec.kind) {
    case PenaltyKind::Lasso:
      return lambda * t;
    case PenaltyKind::Scad: {
      const double a = spec.a;
      if (t <= lambda) return lambda * t;
      if (t <= a * lambda) {
        return -(t * t - 2.0 * a * lambda * t + lambda * lambda) /
               (2.0 * (a - 1.0));
      }
      return 0.5 * (a + 1.0) * lambda * lambda;
    }
    case PenaltyKind::Mcp: {
      const double g = spec.gamma;
      if (t <= g * lambda) return lambda * t - t * t / (2.0 * g);
      return 0.5 * g * lambda * lambda;
    }
  }
  return 0.0;
}

double penalty_value(const Eigen::VectorXd& theta, const PenaltySpec& spec,
                     double lambda) {
  double total = 0.0;
  for (int i = 1; i < theta.size(); ++i) {
    total += scalar_penalty(theta[i], spec, lambda);
  }
  return total;
}

double scalar_update(double z, double lambda, const PenaltySpec& spec) {
  if (lambda == 0.0) return z;
  const double az = std::abs(z);
  switch (spec.kind) {
    case PenaltyKind::Lasso:
      return soft_threshold(z, lambda);
    case PenaltyKind::Scad: {
      const double a = spec.a;
      if (az <= 2.0 * lambda) return soft_threshold(z, lambda);
      if (az <= a * lambda) {
        // minimizer on the transition branch; ties at the boundaries
        // coincide with the neighbouring branches (continuous solution map)
        return soft_threshold(z, a * lambda / (a - 1.0)) /
               (1.0 - 1.0 / (a - 1.0));
      }
      return z;
    }
    case PenaltyKind::Mcp: {
      const double g = spec.gamma;
      if (az <= g * lambda) {
        return soft_threshold(z, lambda) / (1.0 - 1.0 / g);
      }
      return z;
    }
  }
  return z;
}

}  // namespace qreg
