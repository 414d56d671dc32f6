#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "usde/errors.hpp"
#include "usde/experiment.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw usde::ConfigError("--beta-sweep: not a number: \"" + item + "\"");
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw usde::ConfigError("cannot open output file " + path);
  f << text;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw usde::ConfigError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw usde::ConfigError("config file " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased Monte Carlo for SDEs: experiment runner"};

  std::string config_path, experiment, estimator, out, format, sweep, problem_path, mlmc_csv, factor;
  double beta = 0, dt = 0, eps = 0, mu0 = 0, sigma_bar = 0, cap_M = 0, target = 0;
  std::uint64_t n = 0, seed = 0;
  unsigned workers = 0;
  int batches = 0;
  bool tolerant = false;

  app.add_option("--config", config_path, "JSON experiment config; other flags override it");
  auto* o_exp = app.add_option("--experiment", experiment,
                               "table1|table1_spot|table2|sine|table3|table4|table5|gbm|custom");
  auto* o_problem = app.add_option("--problem", problem_path, "JSON problem document (with --experiment custom)");
  auto* o_est = app.add_option("--estimator", estimator, "us_const|us_path|us_general|us_driftless|euler|mlmc");
  auto* o_beta = app.add_option("--beta", beta, "Poisson intensity (default: the model's)");
  auto* o_n = app.add_option("--n", n, "number of samples");
  auto* o_seed = app.add_option("--seed", seed, "64-bit seed");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (0: all cores)");
  auto* o_dt = app.add_option("--dt", dt, "Euler step");
  auto* o_eps = app.add_option("--eps", eps, "MLMC target accuracy");
  auto* o_out = app.add_option("--out", out, "output file (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--beta-sweep", sweep, "comma-separated beta list");
  auto* o_target = app.add_option("--target-stderr", target, "beta sweep: standard error to cost against");
  auto* o_mu0 = app.add_option("--mu0", mu0, "sine model drift scale");
  auto* o_sb = app.add_option("--sigma-bar", sigma_bar, "table5 volatility scale");
  auto* o_cap = app.add_option("--cap", cap_M, "cap M in min(M, e^x)");
  auto* o_factor = app.add_option("--factor", factor, "table3/4 volatility factor: upper|lower");
  auto* o_batches = app.add_option("--batches", batches, "batches for the us_general dispersion");
  auto* o_mlmc_csv = app.add_option("--mlmc-csv", mlmc_csv, "write per-level MLMC diagnostics here");
  auto* o_tol = app.add_flag("--tolerant", tolerant, "count and skip non-finite draws instead of failing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    usde::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = usde::config_from_json(read_json(config_path));
    if (o_exp->count()) cfg.experiment = experiment;
    if (o_problem->count()) cfg.problem = read_json(problem_path);
    if (o_est->count()) {
      cfg.estimator = usde::estimator_from_name(estimator);
      cfg.estimator_set = true;
    }
    if (o_beta->count()) cfg.beta = beta;
    if (o_n->count()) cfg.samples = n;
    if (o_seed->count()) cfg.seed = seed;
    if (o_workers->count()) cfg.workers = workers;
    if (o_dt->count()) cfg.dt = dt;
    if (o_eps->count()) cfg.eps = eps;
    if (o_out->count()) cfg.out_path = out;
    if (o_format->count()) cfg.format = format;
    if (o_target->count()) cfg.target_stderr = target;
    if (o_mu0->count()) cfg.params.mu0 = mu0;
    if (o_sb->count()) cfg.params.sigma_bar = sigma_bar;
    if (o_cap->count()) cfg.params.cap_M = cap_M;
    if (o_factor->count()) cfg.params.factor = factor;
    if (o_batches->count()) cfg.batches = batches;
    if (o_mlmc_csv->count()) cfg.mlmc_csv = mlmc_csv;
    if (o_tol->count()) cfg.tolerant = tolerant;

    const usde::ExperimentOutput result =
        sweep.empty() ? usde::run_experiment(cfg) : usde::beta_sweep(cfg, parse_list(sweep));
    write_text(cfg.out_path,
               cfg.format == "json" ? usde::rows_to_json(result.rows) : usde::rows_to_csv(result.rows));
    if (!cfg.mlmc_csv.empty() && !result.mlmc_levels.empty()) {
      write_text(cfg.mlmc_csv, usde::mlmc_levels_csv(result.mlmc_levels));
    }
    return 0;
  } catch (const usde::LookupError& e) {
    std::cerr << "lookup error: " << e.what() << '\n';
    return 3;
  } catch (const usde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const usde::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 4;
  } catch (const usde::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const usde::ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
