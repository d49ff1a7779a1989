#ifndef QREG_CRITERIA_HPP
#define QREG_CRITERIA_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qreg/likelihood.hpp"
#include "qreg/rng.hpp"
#include "qreg/solver.hpp"

namespace qreg {

// The *1 variants score the restricted MLE refit on the selected support;
// the *2 variants score the path estimate itself. Lq* criteria swap the
// log-likelihood for the L_q-likelihood.
enum class CriterionKind {
  Aic1, Aic2, Bic1, Bic2, LqAic1, LqAic2, LqBic1, LqBic2, Cv,
};

inline constexpr std::array<CriterionKind, 9> kAllCriteria = {
    CriterionKind::Aic1,   CriterionKind::Aic2,  CriterionKind::Bic1,
    CriterionKind::Bic2,   CriterionKind::LqAic1, CriterionKind::LqAic2,
    CriterionKind::LqBic1, CriterionKind::LqBic2, CriterionKind::Cv,
};

const char* criterion_name(CriterionKind kind);
CriterionKind criterion_from_name(const std::string& name);
bool criterion_uses_restricted_mle(CriterionKind kind);

// AIC-like: -2 ll + 2 d'; BIC-like: -2 ll + d' log n; ll is fit.log_lik or,
// for the Lq* kinds, fit.lq_lik. Rejects Cv (no closed-form value) and a
// fit whose source does not match the kind.
double criterion_value(CriterionKind kind, const ModelFit& fit, int n,
                       QIndex q);

// Restricted MLEs keyed by support; one fit per distinct support along a
// path. Valid for a fixed (design, q) pair; not thread-safe, use one per
// worker.
class MleCache {
 public:
  const RestrictedMle& get(const Design& design, const std::vector<int>& support,
                           QIndex q);
  std::size_t size() const { return memo_.size(); }
  int failures() const;  // distinct supports whose MLE did not converge

 private:
  std::map<std::vector<int>, RestrictedMle> memo_;
};

struct Selection {
  bool ok = false;
  int index = -1;       // position in the path
  ModelFit fit;         // estimate the criterion scored
  std::string note;     // set when !ok
  // criterion value at every path point; NaN where unavailable
  std::vector<double> values;
};

// Minimize the criterion across the path. Ties go to the smaller d', then
// to the larger lambda. Path points whose restricted MLE did not converge
// are skipped for the *1 kinds; if no point is scoreable, ok = false.
Selection select_model(const SolutionPath& path, CriterionKind kind,
                       const Design& design, QIndex q,
                       MleCache* cache = nullptr);

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> cv_error;  // mean squared prediction error per lambda
  int chosen_index = -1;
  std::vector<int> skipped_folds;
};

// K-fold cross-validation over the full-data lambda grid. Folds come from a
// seeded shuffle into near-equal blocks; each training complement is
// re-standardized before fitting and its held-out rows are predicted
// through that fold's standardization record. A fold whose training block
// is degenerate (constant column) is skipped and reported.
CvResult cross_validate(const Design& design, const PenaltySpec& spec,
                        const PathConfig& config, int folds, RngStream& rng);

}  // namespace qreg

#endif
