#include "qreg/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qreg {

const char* criterion_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Aic1: return "aic1";
    case CriterionKind::Aic2: return "aic2";
    case CriterionKind::Bic1: return "bic1";
    case CriterionKind::Bic2: return "bic2";
    case CriterionKind::LqAic1: return "lq_aic1";
    case CriterionKind::LqAic2: return "lq_aic2";
    case CriterionKind::LqBic1: return "lq_bic1";
    case CriterionKind::LqBic2: return "lq_bic2";
    case CriterionKind::Cv: return "cv";
  }
  return "?";
}

CriterionKind criterion_from_name(const std::string& name) {
  for (CriterionKind kind : kAllCriteria) {
    if (name == criterion_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown criterion: " + name);
}

bool criterion_uses_restricted_mle(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Aic1:
    case CriterionKind::Bic1:
    case CriterionKind::LqAic1:
    case CriterionKind::LqBic1:
      return true;
    default:
      return false;
  }
}

namespace {

bool criterion_uses_lq(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::LqAic1:
    case CriterionKind::LqAic2:
    case CriterionKind::LqBic1:
    case CriterionKind::LqBic2:
      return true;
    default:
      return false;
  }
}

bool criterion_is_bic(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Bic1:
    case CriterionKind::Bic2:
    case CriterionKind::LqBic1:
    case CriterionKind::LqBic2:
      return true;
    default:
      return false;
  }
}

}  // namespace

double criterion_value(CriterionKind kind, const ModelFit& fit, int n,
                       QIndex /*q*/) {
  if (kind == CriterionKind::Cv) {
    throw std::invalid_argument(
        "criterion_value: CV has no closed form, use cross_validate");
  }
  const FitSource wanted = criterion_uses_restricted_mle(kind)
                               ? FitSource::RestrictedMle
                               : FitSource::PathEstimate;
  if (fit.source != wanted) {
    throw std::invalid_argument("criterion_value: fit source mismatch for " +
                                std::string(criterion_name(kind)));
  }
  const double ll = criterion_uses_lq(kind) ? fit.lq_lik : fit.log_lik;
  const double penalty = criterion_is_bic(kind)
                             ? fit.d_prime * std::log(static_cast<double>(n))
                             : 2.0 * fit.d_prime;
  return -2.0 * ll + penalty;
}

const RestrictedMle& MleCache::get(const Design& design,
                                   const std::vector<int>& support, QIndex q) {
  auto it = memo_.find(support);
  if (it == memo_.end()) {
    it = memo_.emplace(support, mle_restricted(design, support, q)).first;
  }
  return it->second;
}

int MleCache::failures() const {
  int count = 0;
  for (const auto& [support, mle] : memo_) {
    if (!mle.converged) ++count;
  }
  return count;
}

Selection select_model(const SolutionPath& path, CriterionKind kind,
                       const Design& design, QIndex q, MleCache* cache) {
  if (kind == CriterionKind::Cv) {
    throw std::invalid_argument("select_model: CV is handled by cross_validate");
  }
  if (path.size() == 0) {
    throw std::invalid_argument("select_model: empty path");
  }
  MleCache local;
  MleCache& mles = cache ? *cache : local;

  Selection out;
  out.values.assign(path.size(), std::numeric_limits<double>::quiet_NaN());
  double best_value = std::numeric_limits<double>::infinity();
  int best_dprime = 0;
  for (int idx = 0; idx < path.size(); ++idx) {
    const Coefficients& est = path.coefs[idx];
    ModelFit fit;
    if (criterion_uses_restricted_mle(kind)) {
      const std::vector<int> support = est.support();
      const RestrictedMle& mle = mles.get(design, support, q);
      if (!mle.converged) continue;  // criterion unavailable at this point
      fit = make_model_fit(design, mle.theta, q, FitSource::RestrictedMle);
    } else {
      fit = make_model_fit(design, est, q, FitSource::PathEstimate);
    }
    const double value = criterion_value(kind, fit, design.n(), q);
    out.values[idx] = value;
    // ties: smaller d' wins, then the larger lambda (earlier index)
    const bool better =
        !out.ok || value < best_value ||
        (value == best_value && fit.d_prime < best_dprime);
    if (better) {
      out.ok = true;
      out.index = idx;
      best_value = value;
      best_dprime = fit.d_prime;
      out.fit = std::move(fit);
    }
  }
  if (!out.ok) {
    out.note = "criterion unavailable at every path point";
  }
  return out;
}

CvResult cross_validate(const Design& design, const PenaltySpec& spec,
                        const PathConfig& config, int folds, RngStream& rng) {
  const int n = design.n();
  if (folds < 2 || n < folds) {
    throw std::invalid_argument("cross_validate: need 2 <= folds <= n");
  }

  CvResult result;
  result.lambdas = lambda_grid(design, config);
  const int n_lambda = static_cast<int>(result.lambdas.size());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(
        rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<double> sq_err(n_lambda, 0.0);
  long evaluated = 0;
  for (int f = 0; f < folds; ++f) {
    const int lo = static_cast<int>(static_cast<long>(f) * n / folds);
    const int hi = static_cast<int>(static_cast<long>(f + 1) * n / folds);
    const int n_test = hi - lo;
    const int n_train = n - n_test;

    Eigen::MatrixXd train_X(n_train, design.d());
    Eigen::VectorXd train_y(n_train);
    Eigen::MatrixXd test_X(n_test, design.d());
    Eigen::VectorXd test_y(n_test);
    int tr = 0, te = 0;
    for (int pos = 0; pos < n; ++pos) {
      const int row = order[pos];
      if (pos >= lo && pos < hi) {
        test_X.row(te) = design.slopes().row(row);
        test_y[te++] = design.y[row];
      } else {
        train_X.row(tr) = design.slopes().row(row);
        train_y[tr++] = design.y[row];
      }
    }

    Design fold_design;
    try {
      fold_design = standardize(train_X, train_y);
    } catch (const std::invalid_argument&) {
      result.skipped_folds.push_back(f);
      continue;
    }

    Coefficients warm = Coefficients::zeros(design.d());
    for (int k = 0; k < n_lambda; ++k) {
      warm = coordinate_descent(fold_design, spec, result.lambdas[k], warm,
                                config);
      const Eigen::VectorXd pred = predict(warm, test_X, fold_design);
      sq_err[k] += (pred - test_y).squaredNorm();
    }
    evaluated += n_test;
  }

  if (evaluated == 0) {
    throw std::runtime_error("cross_validate: every fold was degenerate");
  }
  result.cv_error.resize(n_lambda);
  for (int k = 0; k < n_lambda; ++k) {
    result.cv_error[k] = sq_err[k] / static_cast<double>(evaluated);
  }
  result.chosen_index = static_cast<int>(
      std::min_element(result.cv_error.begin(), result.cv_error.end()) -
      result.cv_error.begin());
  return result;
}

}  // namespace qreg
