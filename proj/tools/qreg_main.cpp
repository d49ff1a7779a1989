// qreg: sparse linear regression with q-normal (heavy-tailed) errors.
// Subcommands: fit, select, experiment, qmath, summarize.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "qreg/criteria.hpp"
#include "qreg/csv.hpp"
#include "qreg/likelihood.hpp"
#include "qreg/qnormal.hpp"
#include "qreg/simlab.hpp"
#include "qreg/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QREG_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("QREG_SEED is not an integer: " + std::string(env));
    }
  }
  return 1u;
}

PenaltySpec penalty_from_name(const std::string& name, double a,
                              double gamma) {
  if (name == "lasso") return PenaltySpec::lasso();
  if (name == "scad") return PenaltySpec::scad(a);
  if (name == "mcp") return PenaltySpec::mcp(gamma);
  throw UsageError("unknown penalty: " + name +
                   " (expected lasso, scad, or mcp)");
}

struct FitFlags {
  std::string data;
  std::string response;
  std::string penalty = "lasso";
  double a = 3.7;
  double gamma = 3.0;
  PathConfig path;
  std::string out;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--data", flags.data, "input CSV (header row; response is "
                                        "the last column unless --response)")
      ->required();
  cmd->add_option("--response", flags.response, "response column name");
  cmd->add_option("--penalty", flags.penalty, "lasso, scad, or mcp");
  cmd->add_option("--a", flags.a, "SCAD shape parameter");
  cmd->add_option("--gamma", flags.gamma, "MCP shape parameter");
  cmd->add_option("--nlambda", flags.path.n_lambda, "grid size");
  cmd->add_option("--lambda-min-ratio", flags.path.lambda_min_ratio,
                  "smallest lambda as a fraction of lambda_max");
  cmd->add_option("--tol", flags.path.tol, "coordinate-descent tolerance");
  cmd->add_option("--max-iter", flags.path.max_iter, "sweeps per lambda");
  cmd->add_option("--out", flags.out, "output path (default: stdout)");
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

// ---------------------------------------------------------------- fit

int cmd_fit(const FitFlags& flags) {
  const PenaltySpec spec = penalty_from_name(flags.penalty, flags.a,
                                             flags.gamma);
  const CsvTable table = read_csv(flags.data);
  const RegressionData data = split_response(table, flags.response);
  if (data.X.rows() < 2) throw std::runtime_error("need at least 2 rows");
  const Design design = standardize(data.X, data.y);
  const SolutionPath path = solve_path(design, spec, flags.path);

  std::ofstream file;
  std::ostream& os = open_output(flags.out, file);
  os << "lambda,iterations,converged,support_size,intercept";
  for (const std::string& name : data.predictor_names) os << "," << name;
  os << "\n";
  for (int k = 0; k < path.size(); ++k) {
    const Eigen::VectorXd raw = to_raw_scale(path.coefs[k], design);
    os << format_double(path.lambdas[k]) << ","
       << path.reports[k].iterations << ","
       << (path.reports[k].converged ? 1 : 0) << ","
       << path.coefs[k].support().size() << "," << format_double(raw[0]);
    for (int i = 1; i < raw.size(); ++i) os << "," << format_double(raw[i]);
    os << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- select

int cmd_select(const FitFlags& flags, const std::string& criterion,
               double qv, int folds, std::uint64_t seed) {
  const PenaltySpec spec = penalty_from_name(flags.penalty, flags.a,
                                             flags.gamma);
  CriterionKind kind;
  try {
    kind = criterion_from_name(criterion);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  QIndex q = [&] {
    try {
      return QIndex(qv);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }();

  const CsvTable table = read_csv(flags.data);
  const RegressionData data = split_response(table, flags.response);
  const Design design = standardize(data.X, data.y);
  const SolutionPath path = solve_path(design, spec, flags.path);

  json report;
  report["schema_version"] = 1;
  report["penalty"] = spec.name();
  report["criterion"] = criterion_name(kind);
  report["q"] = q.value();
  report["n"] = design.n();
  report["d"] = design.d();
  report["lambdas"] = path.lambdas;

  int index = -1;
  Coefficients chosen;
  if (kind == CriterionKind::Cv) {
    RngStream rng(seed);
    const CvResult cv =
        cross_validate(design, spec, flags.path, folds, rng);
    index = cv.chosen_index;
    chosen = path.coefs[index];
    report["criterion_values"] = cv.cv_error;
    report["cv_skipped_folds"] = cv.skipped_folds;
    report["chosen"]["criterion_value"] = cv.cv_error[index];
  } else {
    const Selection sel = select_model(path, kind, design, q);
    if (!sel.ok) {
      std::cerr << "qreg select: " << sel.note << "\n";
      return kExitRuntime;
    }
    index = sel.index;
    chosen = sel.fit.theta_hat;
    report["criterion_values"] = sel.values;
    report["chosen"]["criterion_value"] = sel.values[index];
    report["chosen"]["d_prime"] = sel.fit.d_prime;
    report["chosen"]["log_likelihood"] = sel.fit.log_lik;
    report["chosen"]["lq_likelihood"] = sel.fit.lq_lik;
    report["chosen"]["estimate_source"] =
        sel.fit.source == FitSource::RestrictedMle ? "restricted_mle"
                                                   : "path_estimate";
  }

  const Eigen::VectorXd raw = to_raw_scale(chosen, design);
  std::vector<std::string> support_names;
  for (int i : chosen.support()) {
    support_names.push_back(data.predictor_names[i - 1]);
  }
  report["chosen"]["index"] = index;
  report["chosen"]["lambda"] = path.lambdas[index];
  report["chosen"]["support"] = chosen.support();
  report["chosen"]["support_names"] = support_names;
  report["chosen"]["intercept_raw"] = raw[0];
  report["chosen"]["coefficients_raw"] =
      std::vector<double>(raw.data() + 1, raw.data() + raw.size());
  report["chosen"]["coefficients_standardized"] = std::vector<double>(
      chosen.theta.data(), chosen.theta.data() + chosen.theta.size());

  std::ofstream file;
  std::ostream& os = open_output(flags.out, file);
  os << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- qmath

int cmd_qmath(const std::string& fn, double u, double y, double qv,
              double xi, double sigma, int count, std::uint64_t seed) {
  QIndex q = [&] {
    try {
      return QIndex(qv);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }();
  try {
    if (fn == "qlog") {
      std::cout << format_double(q_log(u, q)) << "\n";
    } else if (fn == "qexp") {
      std::cout << format_double(q_exp(u, q)) << "\n";
    } else if (fn == "zq") {
      std::cout << format_double(
                       QNormal(q, xi, sigma).normalizing_constant())
                << "\n";
    } else if (fn == "density") {
      std::cout << format_double(QNormal(q, xi, sigma).density(y)) << "\n";
    } else if (fn == "sample") {
      RngStream rng(seed);
      for (double x : sample(QNormal(q, xi, sigma), count, rng)) {
        std::cout << format_double(x) << "\n";
      }
    } else {
      throw UsageError("unknown qmath function: " + fn +
                       " (expected qlog, qexp, density, zq, or sample)");
    }
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

std::vector<double> number_list(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<double>>();
  return {v.get<double>()};
}

template <typename T>
T value_or(const json& j, const std::string& key, T fallback) {
  if (j.contains(key)) return j.at(key).get<T>();
  return fallback;
}

std::vector<ExperimentCase> expand_config(const json& config) {
  if (value_or(config, "schema_version", 0) != 1) {
    throw std::runtime_error("config: expected schema_version 1");
  }
  const json defaults = value_or(config, "defaults", json::object());

  std::vector<ExperimentCase> cases;
  for (const json& entry : config.at("cases")) {
    json merged = defaults;
    merged.update(entry);
    int ordinal = 0;
    for (double qv : number_list(merged, "q")) {
      for (double nv : number_list(merged, "n")) {
        for (double dv : number_list(merged, "d")) {
          for (double rv : number_list(merged, "r_nz")) {
            for (double tv : number_list(merged, "theta0")) {
              ExperimentCase c;
              c.q = qv;
              c.n = static_cast<int>(nv);
              c.d = static_cast<int>(dv);
              c.r_nz = rv;
              c.theta0 = tv;
              c.m_trials = value_or(merged, "m_trials", 100);
              c.m_copies = value_or(merged, "m_copies", 100);
              c.folds = value_or(merged, "folds", 10);
              c.base_seed =
                  value_or<std::uint64_t>(merged, "base_seed", 1) + ordinal;
              c.path.n_lambda = value_or(merged, "n_lambda", 100);
              c.path.lambda_min_ratio =
                  value_or(merged, "lambda_min_ratio", 0.0);
              c.path.tol = value_or(merged, "tol", 1e-7);
              c.path.max_iter = value_or(merged, "max_iter", 10000);
              if (merged.contains("penalties")) {
                c.methods.clear();
                for (const auto& p : merged.at("penalties")) {
                  c.methods.push_back(penalty_from_name(
                      p.get<std::string>(), value_or(merged, "a", 3.7),
                      value_or(merged, "gamma", 3.0)));
                }
              }
              if (merged.contains("criteria")) {
                c.criteria.clear();
                for (const auto& name : merged.at("criteria")) {
                  c.criteria.push_back(
                      criterion_from_name(name.get<std::string>()));
                }
              }
              c.validate();
              cases.push_back(std::move(c));
              ++ordinal;
            }
          }
        }
      }
    }
  }
  if (cases.empty()) throw std::runtime_error("config: no cases");
  return cases;
}

void write_case_csv_header(std::ostream& os) {
  os << "case,q,n,d,r_nz,theta0,m_trials,m_copies,base_seed,trials_run,"
        "trials_failed,mle_attempts,mle_failures,method,criterion,"
        "selections,true_count,true_rate,mean_gen_error,median_gen_error,"
        "best_selection_criterion,best_generalization_criterion\n";
}

void write_case_rows(std::ostream& os, const CaseSummary& summary) {
  const ExperimentCase& c = summary.config;
  const std::string prefix =
      c.label() + "," + format_double(c.q) + "," + std::to_string(c.n) + "," +
      std::to_string(c.d) + "," + format_double(c.r_nz) + "," +
      format_double(c.theta0) + "," + std::to_string(c.m_trials) + "," +
      std::to_string(c.m_copies) + "," + std::to_string(c.base_seed) + "," +
      std::to_string(summary.trials_run) + "," +
      std::to_string(summary.trials_failed) + "," +
      std::to_string(summary.mle_attempts) + "," +
      std::to_string(summary.mle_failures);
  for (std::size_t m = 0; m < c.methods.size(); ++m) {
    for (std::size_t cr = 0; cr < c.criteria.size(); ++cr) {
      const CellSummary& cell = summary.cells[m][cr];
      const double rate =
          summary.trials_run > 0
              ? static_cast<double>(cell.true_count) / summary.trials_run
              : 0.0;
      os << prefix << "," << c.methods[m].name() << ","
         << criterion_name(c.criteria[cr]) << "," << cell.selections << ","
         << cell.true_count << "," << format_double(rate) << ","
         << format_double(cell.mean_gen_error) << ","
         << format_double(cell.median_gen_error) << ",,\n";
    }
    const MethodSummary& ms = summary.methods[m];
    const double best_rate =
        summary.trials_run > 0
            ? static_cast<double>(ms.best_true_count) / summary.trials_run
            : 0.0;
    os << prefix << "," << c.methods[m].name() << ",best,"
       << summary.trials_run << "," << ms.best_true_count << ","
       << format_double(best_rate) << ","
       << format_double(ms.best_mean_gen_error) << ",,"
       << criterion_name(ms.best_selection_criterion) << ","
       << criterion_name(ms.best_generalization_criterion) << "\n";
  }
}

json case_to_json(const ExperimentCase& c) {
  json j;
  j["q"] = c.q;
  j["n"] = c.n;
  j["d"] = c.d;
  j["r_nz"] = c.r_nz;
  j["theta0"] = c.theta0;
  j["m_trials"] = c.m_trials;
  j["m_copies"] = c.m_copies;
  j["base_seed"] = c.base_seed;
  j["folds"] = c.folds;
  j["n_lambda"] = c.path.n_lambda;
  j["lambda_min_ratio"] = c.path.lambda_min_ratio;
  j["tol"] = c.path.tol;
  j["max_iter"] = c.path.max_iter;
  std::vector<std::string> penalties;
  for (const auto& m : c.methods) penalties.emplace_back(m.name());
  j["penalties"] = penalties;
  std::vector<std::string> criteria;
  for (const auto& cr : c.criteria) criteria.emplace_back(criterion_name(cr));
  j["criteria"] = criteria;
  return j;
}

ExperimentCase case_from_json(const json& j) {
  ExperimentCase c;
  c.q = j.at("q").get<double>();
  c.n = j.at("n").get<int>();
  c.d = j.at("d").get<int>();
  c.r_nz = j.at("r_nz").get<double>();
  c.theta0 = j.at("theta0").get<double>();
  c.m_trials = j.at("m_trials").get<int>();
  c.m_copies = j.at("m_copies").get<int>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  c.folds = j.at("folds").get<int>();
  c.path.n_lambda = j.at("n_lambda").get<int>();
  c.path.lambda_min_ratio = j.at("lambda_min_ratio").get<double>();
  c.path.tol = j.at("tol").get<double>();
  c.path.max_iter = j.at("max_iter").get<int>();
  c.methods.clear();
  for (const auto& p : j.at("penalties")) {
    c.methods.push_back(penalty_from_name(p.get<std::string>(), 3.7, 3.0));
  }
  c.criteria.clear();
  for (const auto& name : j.at("criteria")) {
    c.criteria.push_back(criterion_from_name(name.get<std::string>()));
  }
  return c;
}

json trials_to_json(const CaseSummary& summary) {
  json doc;
  doc["schema_version"] = 1;
  doc["case"] = case_to_json(summary.config);
  json trials = json::array();
  for (const TrialResult& t : summary.trials) {
    json jt;
    jt["trial"] = t.trial_index;
    if (!t.error.empty()) jt["error"] = t.error;
    jt["path_converged"] = t.path_converged;
    jt["mle_attempts"] = t.mle_attempts;
    jt["mle_failures"] = t.mle_failures;
    json cells = json::array();
    for (const auto& row : t.cells) {
      json jrow = json::array();
      for (const CellResult& cell : row) {
        json jc;
        jc["selected"] = cell.selected;
        jc["index"] = cell.chosen_index;
        jc["support"] = cell.support;
        jc["true_model"] = cell.true_model;
        jc["from_restricted_mle"] = cell.from_restricted_mle;
        jc["gen_error"] = cell.gen_error;
        jrow.push_back(std::move(jc));
      }
      cells.push_back(std::move(jrow));
    }
    jt["cells"] = std::move(cells);
    trials.push_back(std::move(jt));
  }
  doc["trials"] = std::move(trials);
  return doc;
}

std::vector<TrialResult> trials_from_json(const json& doc,
                                          const ExperimentCase& config) {
  std::vector<TrialResult> trials;
  for (const json& jt : doc.at("trials")) {
    TrialResult t;
    t.trial_index = jt.at("trial").get<int>();
    if (jt.contains("error")) t.error = jt.at("error").get<std::string>();
    t.path_converged = jt.at("path_converged").get<std::vector<bool>>();
    t.mle_attempts = jt.at("mle_attempts").get<int>();
    t.mle_failures = jt.at("mle_failures").get<int>();
    const json& cells = jt.at("cells");
    t.cells.resize(cells.size());
    for (std::size_t m = 0; m < cells.size(); ++m) {
      for (const json& jc : cells[m]) {
        CellResult cell;
        cell.selected = jc.at("selected").get<bool>();
        cell.chosen_index = jc.at("index").get<int>();
        cell.support = jc.at("support").get<std::vector<int>>();
        cell.true_model = jc.at("true_model").get<bool>();
        cell.from_restricted_mle = jc.at("from_restricted_mle").get<bool>();
        cell.gen_error = jc.at("gen_error").get<double>();
        t.cells[m].push_back(std::move(cell));
      }
    }
    if (t.cells.empty()) {
      t.cells.assign(config.methods.size(),
                     std::vector<CellResult>(config.criteria.size()));
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   int workers, bool force, bool save_trials) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error: " + std::string(e.what()));
  }
  const std::vector<ExperimentCase> cases = expand_config(config);

  fs::create_directories(fs::path(out_dir) / "cases");
  if (save_trials) fs::create_directories(fs::path(out_dir) / "trials");

  int failed_cases = 0;
  for (const ExperimentCase& c : cases) {
    const fs::path case_file =
        fs::path(out_dir) / "cases" / (c.label() + ".csv");
    if (fs::exists(case_file) && !force) {
      std::cerr << "skip " << c.label() << " (exists)\n";
      continue;
    }
    try {
      const CaseSummary summary = run_case(c, workers);
      std::ofstream os(case_file);
      write_case_csv_header(os);
      write_case_rows(os, summary);
      if (save_trials) {
        std::ofstream ts(fs::path(out_dir) / "trials" /
                         (c.label() + ".json"));
        ts << trials_to_json(summary).dump() << "\n";
      }
      std::cerr << "done " << c.label() << ": " << summary.trials_run
                << " trials";
      if (summary.trials_failed > 0) {
        std::cerr << ", " << summary.trials_failed << " FAILED";
        ++failed_cases;
      }
      std::cerr << "\n";
    } catch (const std::exception& e) {
      std::cerr << "case " << c.label() << " failed: " << e.what() << "\n";
      ++failed_cases;
    }
  }

  // combined summary, rebuilt from the per-case files
  std::ofstream combined(fs::path(out_dir) / "summary.csv");
  write_case_csv_header(combined);
  for (const ExperimentCase& c : cases) {
    const fs::path case_file =
        fs::path(out_dir) / "cases" / (c.label() + ".csv");
    if (!fs::exists(case_file)) continue;
    std::ifstream is(case_file);
    std::string line;
    std::getline(is, line);  // drop header
    while (std::getline(is, line)) combined << line << "\n";
  }
  return failed_cases == 0 ? kExitOk : kExitRuntime;
}

int cmd_summarize(const std::vector<std::string>& inputs,
                  const std::string& out) {
  std::ofstream file;
  std::ostream& os = open_output(out, file);
  write_case_csv_header(os);
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
    if (value_or(doc, "schema_version", 0) != 1) {
      throw std::runtime_error(path + ": expected schema_version 1");
    }
    const ExperimentCase config = case_from_json(doc.at("case"));
    const CaseSummary summary =
        summarize_trials(config, trials_from_json(doc, config));
    write_case_rows(os, summary);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse linear regression with q-normal errors"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  CLI::App* fit = app.add_subcommand("fit", "solve a penalized path");
  add_fit_flags(fit, fit_flags);

  FitFlags select_flags;
  std::string criterion = "bic2";
  double select_q = 1.0;
  int folds = 10;
  std::uint64_t seed = 0;
  bool seed_given = false;
  CLI::App* select =
      app.add_subcommand("select", "choose a model along the path");
  add_fit_flags(select, select_flags);
  select->add_option("--criterion", criterion,
                     "aic1|aic2|bic1|bic2|lq_aic1|lq_aic2|lq_bic1|lq_bic2|cv");
  select->add_option("--q", select_q, "entropic index in [1, 3)");
  select->add_option("--folds", folds, "CV folds");
  select->add_option("--seed", seed, "CV fold shuffle seed")
      ->each([&](const std::string&) { seed_given = true; });

  std::string config_path, out_dir;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  bool force = false, save_trials = false;
  CLI::App* experiment =
      app.add_subcommand("experiment", "run a Monte-Carlo case grid");
  experiment->add_option("--config", config_path, "JSON case grid")
      ->required();
  experiment->add_option("--out", out_dir, "output directory")->required();
  experiment->add_option("--workers", workers, "worker threads");
  experiment->add_flag("--force", force, "recompute existing cases");
  experiment->add_flag("--save-trials", save_trials,
                       "write per-trial JSON archives");

  std::string qmath_fn;
  double u = 1.0, y = 0.0, qv = 1.0, xi = 0.0, sigma = 1.0;
  int count = 1;
  std::uint64_t qmath_seed = 0;
  bool qmath_seed_given = false;
  CLI::App* qmath = app.add_subcommand("qmath", "evaluate q-math functions");
  qmath->add_option("function", qmath_fn, "qlog|qexp|density|zq|sample")
      ->required();
  qmath->add_option("--u", u, "argument of qlog/qexp");
  qmath->add_option("--y", y, "density evaluation point");
  qmath->add_option("--q", qv, "entropic index in [1, 3)");
  qmath->add_option("--xi", xi, "location");
  qmath->add_option("--sigma", sigma, "dispersion");
  qmath->add_option("--count", count, "number of draws");
  qmath->add_option("--seed", qmath_seed, "sampling seed")
      ->each([&](const std::string&) { qmath_seed_given = true; });

  std::vector<std::string> summarize_inputs;
  std::string summarize_out;
  CLI::App* summarize = app.add_subcommand(
      "summarize", "re-aggregate per-trial JSON archives into summary CSV");
  summarize->add_option("inputs", summarize_inputs, "trial archive JSON files")
      ->required();
  summarize->add_option("--out", summarize_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "qreg: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*fit) return cmd_fit(fit_flags);
    if (*select) {
      return cmd_select(select_flags, criterion, select_q, folds,
                        seed_given ? seed : default_seed());
    }
    if (*experiment) {
      return cmd_experiment(config_path, out_dir, std::max(1, workers), force,
                            save_trials);
    }
    if (*qmath) {
      return cmd_qmath(qmath_fn, u, y, qv, xi, sigma, count,
                       qmath_seed_given ? qmath_seed : default_seed());
    }
    if (*summarize) return cmd_summarize(summarize_inputs, summarize_out);
  } catch (const UsageError& e) {
    std::cerr << "qreg: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CsvError& e) {
    std::cerr << "qreg: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "qreg: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
