#include "qreg/likelihood.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qreg/qnormal.hpp"
#include "qreg/rng.hpp"

namespace qreg {

namespace {

Eigen::MatrixXd support_columns(const Design& design,
                                const std::vector<int>& support) {
  Eigen::MatrixXd cols(design.n(), support.size() + 1);
  cols.col(0).setOnes();
  for (std::size_t k = 0; k < support.size(); ++k) {
    cols.col(static_cast<int>(k) + 1) = design.X.col(support[k]);
  }
  return cols;
}

Coefficients scatter(const Design& design, const std::vector<int>& support,
                     const Eigen::VectorXd& packed) {
  Coefficients coefs = Coefficients::zeros(design.d());
  coefs.theta[0] = packed[0];
  for (std::size_t k = 0; k < support.size(); ++k) {
    coefs.theta[support[k]] = packed[static_cast<int>(k) + 1];
  }
  return coefs;
}

}  // namespace

double log_likelihood(const Design& design, const Eigen::VectorXd& theta,
                      QIndex q) {
  const QNormal err(q, 0.0, 1.0);
  const Eigen::VectorXd r = design.y - design.X * theta;
  double total = 0.0;
  for (int a = 0; a < r.size(); ++a) total += err.log_density(r[a]);
  return total;
}

double lq_likelihood(const Design& design, const Eigen::VectorXd& theta,
                     QIndex q) {
  const QNormal err(q, 0.0, 1.0);
  const Eigen::VectorXd r = design.y - design.X * theta;
  if (q.is_gaussian()) {
    double total = 0.0;
    for (int a = 0; a < r.size(); ++a) total += err.log_density(r[a]);
    return total;
  }
  // log_q f = (f^(1-q) - 1)/(1-q) evaluated as expm1((1-q) log f)/(1-q),
  // which survives residuals where f itself underflows
  const double one_minus_q = 1.0 - q.value();
  double total = 0.0;
  for (int a = 0; a < r.size(); ++a) {
    total += std::expm1(one_minus_q * err.log_density(r[a])) / one_minus_q;
  }
  return total;
}

double lq_likelihood_closed_form(const Design& design,
                                 const Eigen::VectorXd& theta, QIndex q) {
  const QNormal err(q, 0.0, 1.0);
  const double z = err.normalizing_constant();
  const double rss = (design.y - design.X * theta).squaredNorm();
  const double n = static_cast<double>(design.n());
  if (q.is_gaussian()) {
    return -0.5 * rss - n * std::log(z);
  }
  const double c = std::pow(z, q.value() - 1.0) / (3.0 - q.value());
  return -c * rss + n * q_log(1.0 / z, q);
}

RankDeficiencyError::RankDeficiencyError(std::vector<int> cols)
    : std::runtime_error([&] {
        std::string msg = "mlqe: design is rank deficient; dependent columns:";
        for (int c : cols) msg += " x" + std::to_string(c);
        return msg;
      }()),
      columns(std::move(cols)) {}

// The MLqE is the least-squares fit for every q in [1,3); q only gates the
// model's validity.
Coefficients mlqe(const Design& design, QIndex) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  if (qr.rank() < design.X.cols()) {
    std::vector<int> dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (int k = static_cast<int>(qr.rank()); k < design.X.cols(); ++k) {
      const int col = perm[k];
      if (col >= 1) dependent.push_back(col);
    }
    throw RankDeficiencyError(std::move(dependent));
  }
  return Coefficients(qr.solve(design.y));
}

namespace {

struct IrlsRun {
  Eigen::VectorXd packed;
  double log_lik;
  int iterations;
  bool converged;
  bool ascent_violation;
};

double restricted_log_lik(const Design& design,
                          const Eigen::MatrixXd& cols,
                          const Eigen::VectorXd& packed, QIndex q) {
  const QNormal err(q, 0.0, 1.0);
  const Eigen::VectorXd r = design.y - cols * packed;
  double total = 0.0;
  for (int a = 0; a < r.size(); ++a) total += err.log_density(r[a]);
  return total;
}

IrlsRun irls(const Design& design, const Eigen::MatrixXd& cols,
             Eigen::VectorXd start, QIndex q, int max_iter, double tol) {
  const double nu = q.nu();
  IrlsRun run{std::move(start), 0.0, 0, false, false};
  run.log_lik = restricted_log_lik(design, cols, run.packed, q);

  if (q.is_gaussian()) {
    // weights are identically 1: a single weighted solve is the OLS fit,
    // and the start is already that fit
    run.iterations = 1;
    run.converged = true;
    return run;
  }

  const int k = static_cast<int>(cols.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd r = design.y - cols * run.packed;
    const Eigen::ArrayXd w = 1.0 / (1.0 + r.array().square() / nu);
    Eigen::MatrixXd wx = cols.array().colwise() * w;
    Eigen::MatrixXd xtwx = cols.transpose() * wx;
    Eigen::VectorXd xtwy = wx.transpose() * design.y;
    Eigen::VectorXd next = xtwx.ldlt().solve(xtwy);
    if (!next.allFinite()) {
      run.iterations = it + 1;
      return run;
    }
    const double change = (next - run.packed).cwiseAbs().maxCoeff();
    const double next_ll = restricted_log_lik(design, cols, next, q);
    run.iterations = it + 1;
    if (next_ll < run.log_lik - 1e-12 * (1.0 + std::abs(run.log_lik))) {
      run.ascent_violation = true;
      return run;
    }
    run.packed = std::move(next);
    run.log_lik = next_ll;
    if (change < tol) {
      run.converged = true;
      break;
    }
  }
  if (!run.converged) return run;

  // verify first-order optimality: grad_j = (2/(3-q)) sum_a x_aj r_a w_a
  const Eigen::VectorXd r = design.y - cols * run.packed;
  const Eigen::ArrayXd w = 1.0 / (1.0 + r.array().square() / nu);
  const Eigen::VectorXd grad =
      (2.0 / (3.0 - q.value())) *
      (cols.transpose() * (r.array() * w).matrix());
  if (grad.norm() > 1e-6 * std::sqrt(static_cast<double>(k))) {
    run.converged = false;
  }
  return run;
}

std::uint64_t support_seed(const std::vector<int>& support, QIndex q, int n) {
  std::uint64_t h = RngStream::mix(static_cast<std::uint64_t>(n));
  h = RngStream::mix(h ^ std::bit_cast<std::uint64_t>(q.value()));
  for (int s : support) {
    h = RngStream::mix(h ^ static_cast<std::uint64_t>(s));
  }
  return h;
}

}  // namespace

RestrictedMle mle_restricted(const Design& design,
                             const std::vector<int>& support, QIndex q) {
  for (int s : support) {
    if (s < 1 || s > design.d()) {
      throw std::invalid_argument("mle_restricted: support index out of range");
    }
  }
  constexpr int kMaxIter = 500;
  constexpr double kTol = 1e-8;

  const Eigen::MatrixXd cols = support_columns(design, support);
  RestrictedMle result;
  result.theta = Coefficients::zeros(design.d());
  if (cols.cols() > design.n()) {
    return result;  // more free parameters than observations: no MLE
  }

  const Eigen::VectorXd ols =
      cols.colPivHouseholderQr().solve(design.y);
  IrlsRun best = irls(design, cols, ols, q, kMaxIter, kTol);

  if (q.value() >= 2.0) {
    // Cauchy-type likelihoods can be multimodal; jittered restarts around
    // the OLS fit, best final likelihood wins
    RngStream rng(support_seed(support, q, design.n()));
    for (int restart = 0; restart < 3; ++restart) {
      Eigen::VectorXd start = ols;
      for (int j = 0; j < start.size(); ++j) {
        start[j] = start[j] * (1.0 + 0.25 * rng.normal()) + 0.5 * rng.normal();
      }
      IrlsRun run = irls(design, cols, start, q, kMaxIter, kTol);
      const bool better = (run.converged && !best.converged) ||
                          (run.converged == best.converged &&
                           run.log_lik > best.log_lik);
      if (better) best = run;
    }
  }

  result.theta = scatter(design, support, best.packed);
  result.log_lik = best.log_lik;
  result.iterations = best.iterations;
  result.converged = best.converged;
  result.ascent_violation = best.ascent_violation;
  return result;
}

ModelFit make_model_fit(const Design& design, const Coefficients& coefs,
                        QIndex q, FitSource source) {
  ModelFit fit;
  fit.theta_hat = coefs;
  fit.d_prime = static_cast<int>(coefs.support().size()) + 1;
  fit.log_lik = log_likelihood(design, coefs.theta, q);
  fit.lq_lik = lq_likelihood_closed_form(design, coefs.theta, q);
  fit.source = source;
  return fit;
}

}  // namespace qreg
