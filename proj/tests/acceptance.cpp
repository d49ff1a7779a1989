// Acceptance suite: one gate per numbered criterion, each printed as a
// single [PASS]/[FAIL] line. Gates 5-7 check the benchmark reproduction
// targets for the Monte-Carlo study at desk scale; every tolerance is fixed
// here, not tuned at run time.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qreg/criteria.hpp"
#include "qreg/likelihood.hpp"
#include "qreg/qnormal.hpp"
#include "qreg/quadrature.hpp"
#include "qreg/rng.hpp"
#include "qreg/simlab.hpp"
#include "qreg/solver.hpp"

using namespace qreg;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

Design random_instance(int n, int d, std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, 0, 910);
  Design design = gen_design(n, d, rng);
  Eigen::VectorXd y(n);
  for (int a = 0; a < n; ++a) y[a] = rng.normal();
  for (int i = 1; i <= d; ++i) {
    y += (4.0 * rng.uniform() - 2.0) * design.X.col(i);
  }
  design.y = y;
  return design;
}

// 1. scalar_update vs 1-D grid minimization, 500 pairs per penalty
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(1001);
  double worst_arg = 0.0, worst_obj = 0.0;
  long checked = 0;
  for (auto spec : {PenaltySpec::lasso(), PenaltySpec::scad(3.7),
                    PenaltySpec::mcp(3.0)}) {
    for (int rep = 0; rep < 500; ++rep) {
      const double z = 12.0 * rng.uniform() - 6.0;
      const double lambda = 3.0 * rng.uniform();
      const oracles::GridMin grid =
          oracles::scalar_grid_minimum(z, lambda, spec, 1e-4);
      const double closed = scalar_update(z, lambda, spec);
      const double closed_obj = 0.5 * (closed - z) * (closed - z) +
                                scalar_penalty(closed, spec, lambda);
      worst_arg = std::max(worst_arg, std::abs(closed - grid.arg));
      worst_obj = std::max(worst_obj, std::abs(closed_obj - grid.value));
      ++checked;
    }
  }
  const double dt = seconds_since(t0);
  const bool pass =
      worst_arg <= 2e-4 && worst_obj <= 1e-6 && dt < 10.0 && checked == 1500;
  report(1, pass,
         fmt("thresholding oracle, 500 pairs x 3 penalties: max |arg diff| "
             "%.2e (tol 2e-4), max |obj diff| %.2e (tol 1e-6), %.1f s",
             worst_arg, worst_obj, dt));
}

// 2. coordinate descent vs exhaustive d=3 grid, 50 instances
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_gap = -1e300;
  int checked = 0;
  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    const Design design = random_instance(20, 3, 2000 + inst);
    const double lmax = lambda_max(design);
    for (auto spec : {PenaltySpec::lasso(), PenaltySpec::scad(3.7),
                      PenaltySpec::mcp(3.0)}) {
      for (double frac : {0.05, 0.2, 0.5}) {
        const double lambda = frac * lmax;
        const Coefficients fit = coordinate_descent(
            design, spec, lambda, Coefficients::zeros(3), {});
        const double cd_obj = objective_value(design, fit.theta, spec, lambda);
        const double grid_obj =
            oracles::grid_objective_minimum_d3(design, spec, lambda);
        worst_gap = std::max(worst_gap, cd_obj - grid_obj);
        ++checked;
      }
    }
  }
  const double dt = seconds_since(t0);
  const bool pass = worst_gap <= 1e-4 && dt < 300.0 && checked == 450;
  report(2, pass,
         fmt("solver vs grid oracle, 50 instances x 3 penalties x 3 lambdas: "
             "max objective excess %.2e (tol 1e-4), %.1f s",
             worst_gap, dt));
}

// 3. residual-norm identity for the L_q-likelihood + closed-form Z_q
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(3001);
  double worst_rel = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_below(30));
    const int d = 1 + static_cast<int>(rng.uniform_below(5));
    Design design = gen_design(n, d, rng);
    Eigen::VectorXd y(n);
    for (int a = 0; a < n; ++a) {
      y[a] = 3.0 * rng.normal();
      if (rng.uniform() < 0.2) y[a] += 10.0 * rng.student_t(2.0);
    }
    design.y = y;
    Eigen::VectorXd theta(d + 1);
    for (int i = 0; i <= d; ++i) theta[i] = 2.0 * rng.normal();
    const QIndex q(1.0 + 1.999 * rng.uniform());
    const double a_val = lq_likelihood(design, theta, q);
    const double b_val = lq_likelihood_closed_form(design, theta, q);
    worst_rel = std::max(worst_rel,
                         std::abs(a_val - b_val) / (1.0 + std::abs(b_val)));
  }

  double worst_z = 0.0;
  for (double qv : {1.0, 13.0 / 11.0, 1.5, 5.0 / 3.0, 2.0, 2.5}) {
    const QIndex q(qv);
    const double closed = QNormal(q, 0.0, 1.0).normalizing_constant();
    const auto kernel = [&](double y) {
      return q_exp(-y * y / (3.0 - qv), q);
    };
    const double scale = q.is_gaussian() ? 1.0 : std::sqrt(q.nu());
    const double quad = integrate_real_line(kernel, 0.0, scale, 1e-10).value;
    worst_z = std::max(worst_z, std::abs(closed - quad) / quad);
  }
  const double dt = seconds_since(t0);
  const bool pass = worst_rel <= 1e-9 && worst_z <= 1e-6 && dt < 30.0;
  report(3, pass,
         fmt("likelihood identity over 1000 triples: max rel diff %.2e "
             "(tol 1e-9); Z_q closed form vs quadrature: max rel diff %.2e "
             "(tol 1e-6), %.1f s",
             worst_rel, worst_z, dt));
}

// 4. sampler vs quadrature CDF (KS at the 1% level) + t_3 variance
void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 100000;
  const double ks_crit = 1.6276 / std::sqrt(static_cast<double>(n));
  double worst_ks = 0.0;
  std::string ks_detail;
  for (double qv : {1.0, 1.5, 2.0}) {
    const QNormal dist(QIndex(qv), 0.0, 1.0);
    RngStream rng(4000 + static_cast<std::uint64_t>(qv * 10));
    const std::vector<double> draws = sample(dist, n, rng);
    const double ks = oracles::ks_statistic(dist, draws);
    worst_ks = std::max(worst_ks, ks);
  }

  RngStream rng_var(4104);
  const std::vector<double> t3 = sample(QNormal(QIndex(1.5), 0.0, 1.0), n,
                                        rng_var);
  double s1 = 0.0, s2 = 0.0;
  for (double x : t3) {
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  const double dt = seconds_since(t0);
  const bool pass =
      worst_ks < ks_crit && std::abs(var - 3.0) <= 0.3 && dt < 60.0;
  report(4, pass,
         fmt("sampler: max KS over q in {1, 3/2, 2} is %.5f (1%% critical "
             "%.5f); t_3 sample variance %.3f (target 3 +- 0.3), %.1f s",
             worst_ks, ks_crit, var, dt));
}

ExperimentCase benchmark_case(double qv, int n, double theta0, int trials,
                              int copies, std::uint64_t seed) {
  ExperimentCase c;
  c.q = qv;
  c.n = n;
  c.d = 10;
  c.r_nz = 0.2;
  c.theta0 = theta0;
  c.m_trials = trials;
  c.m_copies = copies;
  c.base_seed = seed;
  return c;
}

double best_rate(const CaseSummary& summary, std::size_t method) {
  return static_cast<double>(summary.methods[method].best_true_count) /
         static_cast<double>(summary.trials_run);
}

// 5. benchmark selection rates, q = 1, n = 100, theta0 = 100
void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  const CaseSummary s =
      run_case(benchmark_case(1.0, 100, 100.0, 200, 5, 20260808), 2);
  const double lasso = best_rate(s, 0);
  const double scad = best_rate(s, 1);
  const double mcp = best_rate(s, 2);
  const bool pass = std::abs(mcp - 0.802) <= 0.07 &&
                    std::abs(scad - 0.781) <= 0.07 &&
                    std::abs(lasso - 0.366) <= 0.07;
  report(5, pass,
         fmt("selection benchmark q=1 n=100: best rates lasso %.3f (target "
             "0.366 +- 0.07), scad %.3f (0.781 +- 0.07), mcp %.3f (0.802 +- "
             "0.07), 200 trials, %.0f s",
             lasso, scad, mcp, seconds_since(t0)));
}

// 6. benchmark selection rate, q = 2 (Cauchy errors), theta0 = 1000
void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const CaseSummary s =
      run_case(benchmark_case(2.0, 100, 1000.0, 200, 5, 202), 2);
  const double mcp = best_rate(s, 2);
  const bool pass = std::abs(mcp - 0.967) <= 0.06;
  report(6, pass,
         fmt("selection benchmark q=2 n=100: mcp best rate %.3f (target "
             "0.967 +- 0.06), 200 trials, %.0f s",
             mcp, seconds_since(t0)));
}

// 7. benchmark generalization errors, q = 1, n = 1000
void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const CaseSummary s =
      run_case(benchmark_case(1.0, 1000, 100.0, 100, 100, 20260810), 2);
  const double lasso = s.methods[0].best_mean_gen_error;
  const double scad = s.methods[1].best_mean_gen_error;
  const double mcp = s.methods[2].best_mean_gen_error;
  const bool pass = std::abs(scad - 1.00) <= 0.02 &&
                    std::abs(mcp - 1.00) <= 0.02 &&
                    std::abs(lasso - 1.01) <= 0.02;
  report(7, pass,
         fmt("generalization benchmark q=1 n=1000: best mean error lasso "
             "%.4f (target 1.01 +- 0.02), scad %.4f (1.00 +- 0.02), mcp %.4f "
             "(1.00 +- 0.02), 100 trials x 100 copies, %.0f s",
             lasso, scad, mcp, seconds_since(t0)));
}

// 8. infinite-variance regime: the true-support MLE fit stays finite
void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const QIndex q(2.0);
  bool all_finite = true;
  int converged = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    RngStream rng_x = RngStream::derive(8001, trial, stream_tag::kDesign);
    Design design = gen_design(100, 10, rng_x);
    const Coefficients truth = make_true_theta(10, 0.2, 1000.0);
    RngStream rng_y = RngStream::derive(8001, trial, stream_tag::kResponse);
    design.y = gen_response(design, truth, q, rng_y);
    const RestrictedMle mle = mle_restricted(design, {1, 2}, q);
    if (mle.converged) ++converged;
    RngStream rng_g = RngStream::derive(8001, trial, stream_tag::kCopies);
    const double err = generalization_error(mle.theta, truth, q, 100, 50,
                                            design, rng_g);
    if (!std::isfinite(err)) all_finite = false;
  }
  const bool pass = all_finite && converged == 20;
  report(8, pass,
         fmt("q=2 property: true-support MLE generalization error finite in "
             "20/20 trials (%d MLEs converged); full-grid table values are "
             "not required in this regime, %.0f s",
             converged, seconds_since(t0)));
}

// 9. invariant suites, 1000 randomized repetitions across four families
void criterion_9() {
  const auto t0 = std::chrono::steady_clock::now();
  long violations = 0;
  RngStream rng(9001);

  // (a) lasso objective is non-increasing across sweeps
  PathConfig tracked;
  tracked.track_objective = true;
  for (int rep = 0; rep < 250; ++rep) {
    const Design design = random_instance(25, 4, 9100 + rep);
    const double lambda = (0.05 + 0.4 * rng.uniform()) * lambda_max(design);
    FitReport fit_rep;
    coordinate_descent(design, PenaltySpec::lasso(), lambda,
                       Coefficients::zeros(4), tracked, &fit_rep);
    for (std::size_t k = 1; k < fit_rep.objective_trace.size(); ++k) {
      if (fit_rep.objective_trace[k] >
          fit_rep.objective_trace[k - 1] + 1e-12) {
        ++violations;
      }
    }
  }

  // (b) single SCAD/MCP coordinate update never increases the objective
  for (int rep = 0; rep < 250; ++rep) {
    const Design design = random_instance(15, 3, 9400 + rep);
    const PenaltySpec spec =
        (rep % 2 == 0) ? PenaltySpec::scad(3.7) : PenaltySpec::mcp(3.0);
    const double lambda = 0.1 + 0.4 * rng.uniform();
    Eigen::VectorXd theta(4);
    for (int i = 0; i < 4; ++i) theta[i] = 2.0 * rng.normal();
    const int coord = 1 + static_cast<int>(rng.uniform_below(3));
    const double before = objective_value(design, theta, spec, lambda);
    const Eigen::VectorXd r = design.y - design.X * theta;
    const double z = theta[coord] + design.X.col(coord).dot(r);
    theta[coord] = scalar_update(z, design.n() * lambda, spec);
    if (objective_value(design, theta, spec, lambda) > before + 1e-12) {
      ++violations;
    }
  }

  // (c) the maximum L_q-likelihood estimate does not depend on q
  for (int rep = 0; rep < 250; ++rep) {
    const Design design = random_instance(18, 3, 9700 + rep);
    const QIndex qa(1.0 + 1.999 * rng.uniform());
    const QIndex qb(1.0 + 1.999 * rng.uniform());
    const Coefficients fa = mlqe(design, qa);
    const Coefficients fb = mlqe(design, qb);
    if (!(fa.theta == fb.theta)) ++violations;  // bitwise
  }

  // (d) affine link: lq_likelihood + c * RSS is constant in theta
  for (int rep = 0; rep < 250; ++rep) {
    const Design design = random_instance(16, 3, 9900 + rep);
    const QIndex q(1.0 + 1.999 * rng.uniform());
    const double z = QNormal(q, 0.0, 1.0).normalizing_constant();
    const double c = q.is_gaussian()
                         ? 0.5
                         : std::pow(z, q.value() - 1.0) / (3.0 - q.value());
    double reference = 0.0;
    for (int probe = 0; probe < 3; ++probe) {
      Eigen::VectorXd theta(4);
      for (int i = 0; i < 4; ++i) theta[i] = 3.0 * rng.normal();
      const double rss = (design.y - design.X * theta).squaredNorm();
      const double shift = lq_likelihood(design, theta.eval(), q) + c * rss;
      if (probe == 0) {
        reference = shift;
      } else if (std::abs(shift - reference) >
                 1e-9 * (1.0 + std::abs(reference))) {
        ++violations;
      }
    }
  }

  // seed determinism across the simulation stack
  ExperimentCase tiny = benchmark_case(1.5, 40, 10.0, 1, 5, 9999);
  tiny.d = 4;
  tiny.r_nz = 0.5;
  for (int rep = 0; rep < 20; ++rep) {
    const TrialResult a = run_trial(tiny, rep);
    const TrialResult b = run_trial(tiny, rep);
    for (std::size_t m = 0; m < a.cells.size(); ++m) {
      for (std::size_t cc = 0; cc < a.cells[m].size(); ++cc) {
        const CellResult& x = a.cells[m][cc];
        const CellResult& y = b.cells[m][cc];
        if (x.selected != y.selected || x.support != y.support ||
            x.gen_error != y.gen_error) {
          ++violations;
        }
      }
    }
  }

  const double dt = seconds_since(t0);
  const bool pass = violations == 0 && dt < 600.0;
  report(9, pass,
         fmt("invariant suites (descent, nonconvex updates, q-invariance, "
             "affine link, seed determinism): %ld violations across 1000+ "
             "randomized repetitions, %.0f s",
             violations, dt));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
