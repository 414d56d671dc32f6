#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "usde/baselines.hpp"
#include "usde/catalog.hpp"
#include "usde/estimator.hpp"

namespace usde {

enum class EstimatorKind { UsConst, UsPath, UsGeneral, UsDriftless, Euler, Mlmc };

std::string estimator_name(EstimatorKind kind);
// Throws ConfigError for an unknown name.
EstimatorKind estimator_from_name(const std::string& name);

struct ExperimentConfig {
  // A catalog name, or "custom" together with `problem`.
  std::string experiment = "table1";
  nlohmann::json problem;
  CatalogParams params;
  // Unset: the natural estimator of the problem family.
  bool estimator_set = false;
  EstimatorKind estimator = EstimatorKind::UsConst;
  // 0: the model's default β.
  double beta = 0.0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  double dt = 0.1;
  // MLMC target accuracy.
  double eps = 0.0;
  int mlmc_refinement = 4;
  std::uint64_t mlmc_initial = 10000;
  int mlmc_max_level = 10;
  int batches = 100;
  bool tolerant = false;
  // β sweep: the work to reach this standard error is reported per β.
  double target_stderr = 2e-4;
  std::string out_path;
  std::string format = "csv";
  std::string mlmc_csv;
};

struct ResultRow {
  std::string experiment;
  std::string method;
  std::uint64_t n = 0;
  double mean = 0.0;
  // Standard error, or for the general estimator the interquartile range of
  // batch means (see spread_kind).
  double spread = 0.0;
  std::string spread_kind = "stderr";
  double batch_median = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string config_hash;
  double jumps_per_draw = 0.0;
  double cost_per_draw = 0.0;
  std::uint64_t invalid = 0;
  double variance_ratio = std::numeric_limits<double>::quiet_NaN();
  bool heavy_tail = false;
  double beta_star = std::numeric_limits<double>::quiet_NaN();
  // variance · cost per draw / target², the cost units needed for target_stderr.
  double work_to_target = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<MlmcLevel> mlmc_levels;
};

// Throws ConfigError for invalid settings or an estimator that does not
// apply to the problem family.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// One row per β; each row also carries the advisory β* when the problem has
// constant volatility.
ExperimentOutput beta_sweep(const ExperimentConfig& config, const std::vector<double>& betas);

// FNV-1a of the configuration fields that determine the statistical output.
std::string config_hash(const ExperimentConfig& config);

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string rows_to_json(const std::vector<ResultRow>& rows);
std::string mlmc_levels_csv(const std::vector<MlmcLevel>& levels);

}  // namespace usde
