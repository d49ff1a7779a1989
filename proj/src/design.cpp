#include "qreg/design.hpp"

#include <cmath>
#include <string>

namespace qreg {

std::vector<int> Coefficients::support() const {
  std::vector<int> s;
  for (int i = 1; i < theta.size(); ++i) {
    if (theta[i] != 0.0) s.push_back(i);
  }
  return s;
}

ZeroVarianceError::ZeroVarianceError(int col)
    : std::invalid_argument("standardize: column " + std::to_string(col) +
                            " has zero variance"),
      column(col) {}

Design standardize(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(raw_X.rows());
  const int d = static_cast<int>(raw_X.cols());
  if (n < 2 || d < 1) {
    throw std::invalid_argument("standardize: need n >= 2 and d >= 1");
  }
  if (y.size() != n) {
    throw std::invalid_argument("standardize: y length does not match X rows");
  }
  if (!raw_X.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("standardize: non-finite entries");
  }

  Design design;
  design.X.resize(n, d + 1);
  design.X.col(0).setOnes();
  design.y = y;
  design.col_mean.resize(d);
  design.col_scale.resize(d);

  for (int i = 0; i < d; ++i) {
    const double mean = raw_X.col(i).mean();
    Eigen::VectorXd centered = raw_X.col(i).array() - mean;
    const double scale = centered.norm();
    if (scale == 0.0) throw ZeroVarianceError(i + 1);
    design.col_mean[i] = mean;
    design.col_scale[i] = scale;
    design.X.col(i + 1) = centered / scale;
  }
  return design;
}

Eigen::VectorXd predict(const Coefficients& coefs,
                        const Eigen::MatrixXd& new_raw_X,
                        const Design& design) {
  const int d = design.d();
  if (new_raw_X.cols() != d) {
    throw std::invalid_argument(
        "predict: expected " + std::to_string(d) + " predictor columns, got " +
        std::to_string(new_raw_X.cols()));
  }
  if (coefs.n_slopes() != d) {
    throw std::invalid_argument("predict: coefficient length mismatch");
  }
  Eigen::VectorXd yhat =
      Eigen::VectorXd::Constant(new_raw_X.rows(), coefs.intercept());
  for (int i = 0; i < d; ++i) {
    const double ti = coefs.theta[i + 1];
    if (ti == 0.0) continue;
    yhat += (new_raw_X.col(i).array() - design.col_mean[i]).matrix() *
            (ti / design.col_scale[i]);
  }
  return yhat;
}

Eigen::VectorXd to_raw_scale(const Coefficients& coefs, const Design& design) {
  const int d = design.d();
  Eigen::VectorXd raw(d + 1);
  double intercept = coefs.intercept();
  for (int i = 0; i < d; ++i) {
    raw[i + 1] = coefs.theta[i + 1] / design.col_scale[i];
    intercept -= design.col_mean[i] * raw[i + 1];
  }
  raw[0] = intercept;
  return raw;
}

}  // namespace qreg
