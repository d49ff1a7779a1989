#ifndef QREG_SIMLAB_HPP
#define QREG_SIMLAB_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qreg/criteria.hpp"
#include "qreg/design.hpp"
#include "qreg/penalty.hpp"
#include "qreg/qfun.hpp"
#include "qreg/rng.hpp"
#include "qreg/solver.hpp"

namespace qreg {

// Sub-stream tags: every random quantity in a trial derives from
// (base_seed, trial_index, tag), so any subset of trials can be replayed.
namespace stream_tag {
inline constexpr std::uint64_t kDesign = 1;
inline constexpr std::uint64_t kResponse = 2;
inline constexpr std::uint64_t kCopies = 3;
inline constexpr std::uint64_t kCvBase = 16;  // + method index
}  // namespace stream_tag

std::vector<PenaltySpec> default_methods();  // lasso, scad(3.7), mcp(3)
std::vector<CriterionKind> all_criteria();

// One cell of the experiment grid: a (q, n, d, r_nz, theta0) configuration
// with its trial/copy counts and seed.
struct ExperimentCase {
  double q = 1.0;
  int n = 100;
  int d = 10;
  double r_nz = 0.2;
  double theta0 = 1.0;
  int m_trials = 100;
  int m_copies = 100;
  std::uint64_t base_seed = 1;
  int folds = 10;
  std::vector<PenaltySpec> methods = default_methods();
  std::vector<CriterionKind> criteria = all_criteria();
  PathConfig path;

  int nonzero_count() const;
  void validate() const;
  std::string label() const;  // filesystem-friendly case id
};

// True coefficient vector: the first d*r_nz slopes equal theta0, the rest
// are zero, intercept zero.
Coefficients make_true_theta(int d, double r_nz, double theta0);

// Standard-normal raw entries, standardized; the response is left zero.
Design gen_design(int n, int d, RngStream& rng);

// y = X theta_true + eps with eps i.i.d. q-normal(0, 1).
Eigen::VectorXd gen_response(const Design& design,
                             const Coefficients& theta_true, QIndex q,
                             RngStream& rng);

// Mean over m_copies fresh (y', X') draws of (1/n)||y' - X' theta_hat||^2.
double generalization_error(const Coefficients& theta_hat,
                            const Coefficients& theta_true, QIndex q, int n,
                            int m_copies, const Design& design,
                            RngStream& rng);

struct CellResult {
  bool selected = false;
  int chosen_index = -1;
  std::vector<int> support;
  bool true_model = false;
  bool from_restricted_mle = false;
  double gen_error = 0.0;
};

struct TrialResult {
  int trial_index = 0;
  std::string error;  // nonempty when the whole trial failed
  // cells[method][criterion]
  std::vector<std::vector<CellResult>> cells;
  std::vector<bool> path_converged;  // per method
  int mle_attempts = 0;
  int mle_failures = 0;
};

struct CellSummary {
  long selections = 0;  // trials where the criterion produced a choice
  long true_count = 0;
  double mean_gen_error = 0.0;
  double median_gen_error = 0.0;  // heavy-tail diagnostic, not a paper value
};

struct MethodSummary {
  long best_true_count = 0;
  CriterionKind best_selection_criterion = CriterionKind::Bic2;
  double best_mean_gen_error = 0.0;
  CriterionKind best_generalization_criterion = CriterionKind::Bic2;
};

struct CaseSummary {
  ExperimentCase config;
  long trials_run = 0;
  long trials_failed = 0;
  // indexed [method][criterion] following config.methods / config.criteria
  std::vector<std::vector<CellSummary>> cells;
  std::vector<MethodSummary> methods;
  long mle_attempts = 0;
  long mle_failures = 0;
  std::vector<TrialResult> trials;
};

// One full trial: generate data, solve the three penalty paths, apply every
// criterion, record support matches and the generalization error of each
// selected estimate. Fresh test copies are drawn once per trial and shared
// by all cells. Deterministic in (case, trial_index).
TrialResult run_trial(const ExperimentCase& config, int trial_index);

// Aggregate in trial-index order (fixed reduction order).
CaseSummary summarize_trials(const ExperimentCase& config,
                             std::vector<TrialResult> trials);

// Trials [trial_begin, trial_end) on a worker pool; trial_end < 0 means
// config.m_trials. Trials are independent; aggregation is order-fixed.
CaseSummary run_case(const ExperimentCase& config, int workers = 1,
                     int trial_begin = 0, int trial_end = -1);

}  // namespace qreg

#endif
