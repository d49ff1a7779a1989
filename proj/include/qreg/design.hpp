#ifndef QREG_DESIGN_HPP
#define QREG_DESIGN_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace qreg {

// Coefficient vector on the standardized scale: theta[0] is the intercept,
// theta[1..d] are slopes. The support is exact nonzero-ness, no epsilon.
struct Coefficients {
  Eigen::VectorXd theta;

  Coefficients() = default;
  explicit Coefficients(Eigen::VectorXd t) : theta(std::move(t)) {}
  static Coefficients zeros(int d) {
    return Coefficients(Eigen::VectorXd::Zero(d + 1));
  }

  int n_slopes() const { return static_cast<int>(theta.size()) - 1; }
  double intercept() const { return theta[0]; }

  // Slope indices i in 1..d with theta[i] != 0, ascending.
  std::vector<int> support() const;
};

struct ZeroVarianceError : std::invalid_argument {
  int column;  // 1-based predictor index
  explicit ZeroVarianceError(int col);
};

// Design matrix with intercept column x_0 = 1 and response y. Non-intercept
// columns are centered to zero sum and scaled to unit Euclidean norm; the
// original per-column mean and norm are kept so coefficients and new data
// can be mapped between raw and standardized scales. Immutable in use.
struct Design {
  Eigen::MatrixXd X;          // n x (d+1), column 0 all ones
  Eigen::VectorXd y;          // length n
  Eigen::VectorXd col_mean;   // length d, raw column means
  Eigen::VectorXd col_scale;  // length d, raw centered-column norms

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()) - 1; }

  double y_mean() const { return y.mean(); }

  // Standardized slope block (columns 1..d).
  auto slopes() const { return X.rightCols(d()); }
};

// Center each raw column to zero sum and scale to unit norm, then prepend
// the intercept column. A constant column has no scale and is rejected.
Design standardize(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& y);

// Apply the stored standardization of `design` to new raw rows and evaluate
// yhat = theta0 + sum_i x_i theta_i.
Eigen::VectorXd predict(const Coefficients& coefs,
                        const Eigen::MatrixXd& new_raw_X,
                        const Design& design);

// Map standardized-scale coefficients back to the raw input scale.
Eigen::VectorXd to_raw_scale(const Coefficients& coefs, const Design& design);

}  // namespace qreg

#endif
