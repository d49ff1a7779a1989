#include "qreg/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qreg/qnormal.hpp"

namespace qreg {

std::vector<PenaltySpec> default_methods() {
  return {PenaltySpec::lasso(), PenaltySpec::scad(3.7), PenaltySpec::mcp(3.0)};
}

std::vector<CriterionKind> all_criteria() {
  return {kAllCriteria.begin(), kAllCriteria.end()};
}

int ExperimentCase::nonzero_count() const {
  const double k = static_cast<double>(d) * r_nz;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 1.0) {
    throw std::invalid_argument(
        "ExperimentCase: d * r_nz must be a positive integer");
  }
  return static_cast<int>(rounded);
}

void ExperimentCase::validate() const {
  QIndex probe(q);  // enforces 1 <= q < 3
  (void)probe;
  if (n < 2 || d < 1) {
    throw std::invalid_argument("ExperimentCase: need n >= 2 and d >= 1");
  }
  if (!(r_nz > 0.0) || !(r_nz <= 1.0)) {
    throw std::invalid_argument("ExperimentCase: r_nz must be in (0, 1]");
  }
  if (!(theta0 > 0.0)) {
    throw std::invalid_argument("ExperimentCase: theta0 must be positive");
  }
  if (m_trials < 1 || m_copies < 1) {
    throw std::invalid_argument("ExperimentCase: m_trials/m_copies >= 1");
  }
  if (folds < 2 || folds > n) {
    throw std::invalid_argument("ExperimentCase: need 2 <= folds <= n");
  }
  if (methods.empty() || criteria.empty()) {
    throw std::invalid_argument("ExperimentCase: empty method/criterion list");
  }
  nonzero_count();
  path.validate();
}

std::string ExperimentCase::label() const {
  std::ostringstream os;
  os << "q" << q << "_n" << n << "_d" << d << "_rnz" << r_nz << "_t" << theta0
     << "_m" << m_trials << "_seed" << base_seed;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

Coefficients make_true_theta(int d, double r_nz, double theta0) {
  if (d < 1) throw std::invalid_argument("make_true_theta: d >= 1");
  const double k = static_cast<double>(d) * r_nz;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 1.0) {
    throw std::invalid_argument(
        "make_true_theta: d * r_nz must be a positive integer");
  }
  Coefficients theta = Coefficients::zeros(d);
  for (int i = 1; i <= static_cast<int>(rounded); ++i) theta.theta[i] = theta0;
  return theta;
}

Design gen_design(int n, int d, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("gen_design: n >= 2");
  Eigen::MatrixXd raw(n, d);
  for (int i = 0; i < d; ++i) {
    for (int a = 0; a < n; ++a) raw(a, i) = rng.normal();
  }
  return standardize(raw, Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd gen_response(const Design& design,
                             const Coefficients& theta_true, QIndex q,
                             RngStream& rng) {
  if (theta_true.theta.size() != design.d() + 1) {
    throw std::invalid_argument("gen_response: coefficient length mismatch");
  }
  Eigen::VectorXd y = design.X * theta_true.theta;
  const QNormal err(q, 0.0, 1.0);
  const std::vector<double> eps = sample(err, design.n(), rng);
  for (int a = 0; a < design.n(); ++a) y[a] += eps[a];
  return y;
}

namespace {

double copy_sq_error(const Design& fresh, const Eigen::VectorXd& y_prime,
                     const Coefficients& theta_hat) {
  const Eigen::VectorXd pred = fresh.X * theta_hat.theta;
  return (y_prime - pred).squaredNorm() / fresh.n();
}

}  // namespace

double generalization_error(const Coefficients& theta_hat,
                            const Coefficients& theta_true, QIndex q, int n,
                            int m_copies, const Design& design,
                            RngStream& rng) {
  if (theta_hat.theta.size() != design.d() + 1) {
    throw std::invalid_argument(
        "generalization_error: coefficient length mismatch");
  }
  double total = 0.0;
  for (int c = 0; c < m_copies; ++c) {
    Design fresh = gen_design(n, design.d(), rng);
    const Eigen::VectorXd y_prime = gen_response(fresh, theta_true, q, rng);
    total += copy_sq_error(fresh, y_prime, theta_hat);
  }
  return total / m_copies;
}

TrialResult run_trial(const ExperimentCase& config, int trial_index) {
  config.validate();
  const QIndex q(config.q);
  const auto trial = static_cast<std::uint64_t>(trial_index);

  TrialResult result;
  result.trial_index = trial_index;

  RngStream rng_design =
      RngStream::derive(config.base_seed, trial, stream_tag::kDesign);
  Design design = gen_design(config.n, config.d, rng_design);
  const Coefficients theta_true =
      make_true_theta(config.d, config.r_nz, config.theta0);
  RngStream rng_response =
      RngStream::derive(config.base_seed, trial, stream_tag::kResponse);
  design.y = gen_response(design, theta_true, q, rng_response);
  const std::vector<int> true_support = theta_true.support();

  const auto n_methods = config.methods.size();
  const auto n_criteria = config.criteria.size();
  result.cells.assign(n_methods, std::vector<CellResult>(n_criteria));
  result.path_converged.assign(n_methods, true);

  // estimates pending a generalization-error evaluation, deduplicated:
  // restricted-MLE fits by support (method-independent), path estimates by
  // (method, path index)
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> mle_estimates;
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>>
      path_estimates;
  std::map<std::vector<int>, Coefficients> mle_theta;
  std::map<std::pair<int, int>, Coefficients> path_theta;

  MleCache cache;  // restricted MLEs depend on (design, q) only
  for (std::size_t m = 0; m < n_methods; ++m) {
    const PenaltySpec& spec = config.methods[m];
    const SolutionPath path = solve_path(design, spec, config.path);
    for (const FitReport& rep : path.reports) {
      if (!rep.converged) result.path_converged[m] = false;
    }

    for (std::size_t c = 0; c < n_criteria; ++c) {
      const CriterionKind kind = config.criteria[c];
      CellResult& cell = result.cells[m][c];
      if (kind == CriterionKind::Cv) {
        RngStream rng_cv = RngStream::derive(
            config.base_seed, trial,
            stream_tag::kCvBase + static_cast<std::uint64_t>(m));
        const CvResult cv = cross_validate(design, spec, config.path,
                                           config.folds, rng_cv);
        const Coefficients& est = path.coefs[cv.chosen_index];
        cell.selected = true;
        cell.chosen_index = cv.chosen_index;
        cell.support = est.support();
        cell.from_restricted_mle = false;
        const std::pair<int, int> key(static_cast<int>(m), cv.chosen_index);
        path_theta.emplace(key, est);
        path_estimates[key].emplace_back(static_cast<int>(m),
                                         static_cast<int>(c));
      } else {
        const Selection sel = select_model(path, kind, design, q, &cache);
        if (!sel.ok) continue;
        cell.selected = true;
        cell.chosen_index = sel.index;
        cell.support = sel.fit.theta_hat.support();
        cell.from_restricted_mle =
            (sel.fit.source == FitSource::RestrictedMle);
        if (cell.from_restricted_mle) {
          const std::vector<int> key = cell.support;
          mle_theta.emplace(key, sel.fit.theta_hat);
          mle_estimates[key].emplace_back(static_cast<int>(m),
                                          static_cast<int>(c));
        } else {
          const std::pair<int, int> key(static_cast<int>(m), sel.index);
          path_theta.emplace(key, sel.fit.theta_hat);
          path_estimates[key].emplace_back(static_cast<int>(m),
                                           static_cast<int>(c));
        }
      }
      cell.true_model = (cell.support == true_support);
    }
  }

  // fresh copies are drawn once per trial and shared by every cell
  std::map<std::vector<int>, double> mle_gen;
  std::map<std::pair<int, int>, double> path_gen;
  for (const auto& [key, cells] : mle_estimates) mle_gen[key] = 0.0;
  for (const auto& [key, cells] : path_estimates) path_gen[key] = 0.0;
  RngStream rng_copies =
      RngStream::derive(config.base_seed, trial, stream_tag::kCopies);
  for (int c = 0; c < config.m_copies; ++c) {
    const Design fresh = gen_design(config.n, config.d, rng_copies);
    const Eigen::VectorXd y_prime =
        gen_response(fresh, theta_true, q, rng_copies);
    for (auto& [key, acc] : mle_gen) {
      acc += copy_sq_error(fresh, y_prime, mle_theta.at(key));
    }
    for (auto& [key, acc] : path_gen) {
      acc += copy_sq_error(fresh, y_prime, path_theta.at(key));
    }
  }
  for (const auto& [key, cells] : mle_estimates) {
    const double err = mle_gen.at(key) / config.m_copies;
    for (const auto& [m, c] : cells) result.cells[m][c].gen_error = err;
  }
  for (const auto& [key, cells] : path_estimates) {
    const double err = path_gen.at(key) / config.m_copies;
    for (const auto& [m, c] : cells) result.cells[m][c].gen_error = err;
  }

  result.mle_attempts = static_cast<int>(cache.size());
  result.mle_failures = cache.failures();
  return result;
}

CaseSummary summarize_trials(const ExperimentCase& config,
                             std::vector<TrialResult> trials) {
  const auto n_methods = config.methods.size();
  const auto n_criteria = config.criteria.size();

  CaseSummary summary;
  summary.config = config;
  summary.cells.assign(n_methods, std::vector<CellSummary>(n_criteria));

  std::vector<std::vector<std::vector<double>>> gen_samples(
      n_methods, std::vector<std::vector<double>>(n_criteria));

  for (const TrialResult& trial : trials) {
    if (!trial.error.empty()) {
      summary.trials_failed += 1;
      continue;
    }
    summary.trials_run += 1;
    summary.mle_attempts += trial.mle_attempts;
    summary.mle_failures += trial.mle_failures;
    for (std::size_t m = 0; m < n_methods; ++m) {
      for (std::size_t c = 0; c < n_criteria; ++c) {
        const CellResult& cell = trial.cells[m][c];
        if (!cell.selected) continue;
        CellSummary& agg = summary.cells[m][c];
        agg.selections += 1;
        if (cell.true_model) agg.true_count += 1;
        agg.mean_gen_error += cell.gen_error;
        gen_samples[m][c].push_back(cell.gen_error);
      }
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  summary.methods.assign(n_methods, MethodSummary{});
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodSummary& ms = summary.methods[m];
    ms.best_true_count = -1;
    ms.best_mean_gen_error = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_criteria; ++c) {
      CellSummary& agg = summary.cells[m][c];
      if (agg.selections > 0) {
        agg.mean_gen_error /= static_cast<double>(agg.selections);
        std::vector<double>& xs = gen_samples[m][c];
        std::sort(xs.begin(), xs.end());
        const std::size_t mid = xs.size() / 2;
        agg.median_gen_error = (xs.size() % 2 == 1)
                                   ? xs[mid]
                                   : 0.5 * (xs[mid - 1] + xs[mid]);
      } else {
        agg.mean_gen_error = nan;
        agg.median_gen_error = nan;
      }
      if (agg.true_count > ms.best_true_count) {
        ms.best_true_count = agg.true_count;
        ms.best_selection_criterion = config.criteria[c];
      }
      if (agg.selections > 0 &&
          agg.mean_gen_error < ms.best_mean_gen_error) {
        ms.best_mean_gen_error = agg.mean_gen_error;
        ms.best_generalization_criterion = config.criteria[c];
      }
    }
    if (ms.best_true_count < 0) ms.best_true_count = 0;
    if (std::isinf(ms.best_mean_gen_error)) ms.best_mean_gen_error = nan;
  }

  summary.trials = std::move(trials);
  return summary;
}

CaseSummary run_case(const ExperimentCase& config, int workers,
                     int trial_begin, int trial_end) {
  config.validate();
  if (trial_end < 0) trial_end = config.m_trials;
  if (trial_begin < 0 || trial_begin > trial_end) {
    throw std::invalid_argument("run_case: bad trial range");
  }
  const int count = trial_end - trial_begin;
  std::vector<TrialResult> trials(count);

  workers = std::max(1, std::min(workers, count));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int slot = next.fetch_add(1);
      if (slot >= count) return;
      const int index = trial_begin + slot;
      try {
        trials[slot] = run_trial(config, index);
      } catch (const std::exception& e) {
        trials[slot].trial_index = index;
        trials[slot].error = e.what();
        trials[slot].cells.assign(
            config.methods.size(),
            std::vector<CellResult>(config.criteria.size()));
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return summarize_trials(config, std::move(trials));
}

}  // namespace qreg
