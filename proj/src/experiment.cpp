#include "usde/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "usde/errors.hpp"
#include "usde/est_const.hpp"
#include "usde/est_driftless1d.hpp"
#include "usde/est_general.hpp"
#include "usde/est_path.hpp"
#include "usde/problem_json.hpp"
#include "usde/sampler.hpp"

namespace usde {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CatalogEntry resolve_problem(const ExperimentConfig& c) {
  if (c.experiment == "custom") {
    if (c.problem.is_null()) throw ConfigError("experiment \"custom\" needs a problem document");
    return problem_from_json(c.problem);
  }
  return catalog_lookup(c.experiment, c.params);
}

EstimatorKind natural_estimator(const AnyProblem& p) {
  switch (p.index()) {
    case 0: return EstimatorKind::UsConst;
    case 1: return EstimatorKind::UsGeneral;
    case 2: return EstimatorKind::UsDriftless;
    default: return EstimatorKind::UsPath;
  }
}

void validate(const ExperimentConfig& c) {
  if (c.samples < 1) throw ConfigError("N must be at least 1");
  if (c.beta < 0.0 || !std::isfinite(c.beta)) throw ConfigError("beta must be positive");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
  if (c.batches < 10) throw ConfigError("batches must be at least 10");
}

[[noreturn]] void mismatch(EstimatorKind kind, const AnyProblem& p) {
  throw ConfigError("estimator " + estimator_name(kind) + " does not apply to a " +
                    family_name(p) + " problem");
}

GeneralProblem general_view(EstimatorKind kind, const AnyProblem& p) {
  if (const auto* q = std::get_if<GeneralProblem>(&p)) return *q;
  if (const auto* q = std::get_if<ConstVolProblem>(&p)) return as_general(*q);
  if (const auto* q = std::get_if<Driftless1dProblem>(&p)) return as_general(*q);
  mismatch(kind, p);
}

void fill_from_run(ResultRow& row, const SampleRun& run) {
  const RunStats& s = run.stats;
  row.n = s.count();
  row.mean = s.mean();
  row.spread = s.stderr_mean();
  row.wall_time_s = run.wall_seconds;
  const double draws = static_cast<double>(s.count() + s.invalid());
  row.jumps_per_draw = static_cast<double>(s.cost().jumps) / draws;
  row.cost_per_draw = static_cast<double>(s.cost().cost_units) / draws;
  row.invalid = s.invalid();
}

ResultRow run_us(const ExperimentConfig& c, const CatalogEntry& entry, EstimatorKind kind, double beta) {
  SamplerOptions opt;
  opt.seed = c.seed;
  opt.samples = c.samples;
  opt.workers = c.workers;
  opt.policy = c.tolerant ? InvalidPolicy::Tolerant : InvalidPolicy::Strict;
  opt.keep_values = kind == EstimatorKind::UsGeneral;

  const AnyProblem& p = entry.problem;
  SampleRun run;
  switch (kind) {
    case EstimatorKind::UsConst: {
      const auto* q = std::get_if<ConstVolProblem>(&p);
      if (!q) mismatch(kind, p);
      run = run_samples(opt, [&](RngStream& s) { return draw_psi_const(*q, entry.payoff, beta, s); });
      break;
    }
    case EstimatorKind::UsPath: {
      if (const auto* q = std::get_if<PathProblem>(&p)) {
        run = run_samples(opt, [&](RngStream& s) { return draw_psi_path(*q, beta, s); });
      } else if (const auto* q = std::get_if<ConstVolProblem>(&p)) {
        const PathProblem pp = as_path(*q, entry.payoff);
        run = run_samples(opt, [&](RngStream& s) { return draw_psi_path(pp, beta, s); });
      } else {
        mismatch(kind, p);
      }
      break;
    }
    case EstimatorKind::UsGeneral: {
      const GeneralProblem q = general_view(kind, p);
      run = run_samples(opt, [&](RngStream& s) { return draw_psi_general(q, entry.payoff, beta, s); });
      break;
    }
    case EstimatorKind::UsDriftless: {
      const auto* q = std::get_if<Driftless1dProblem>(&p);
      if (!q) mismatch(kind, p);
      run = run_samples(opt, [&](RngStream& s) { return draw_psi_bar(*q, entry.payoff, beta, s); });
      break;
    }
    default:
      throw ConfigError("internal: not an unbiased estimator");
  }

  ResultRow row;
  fill_from_run(row, run);
  row.beta = beta;
  const TailDiagnostic tail = variance_growth(run);
  row.variance_ratio = tail.variance_ratio;
  row.heavy_tail = tail.warning;
  if (kind == EstimatorKind::UsGeneral) {
    std::vector<double> values;
    values.reserve(run.values.size());
    for (double v : run.values) {
      if (!std::isnan(v)) values.push_back(v);
    }
    if (values.size() < static_cast<std::size_t>(c.batches)) {
      throw ConfigError("us_general needs at least one sample per batch");
    }
    const BatchDispersion bd = batch_median_dispersion(values, c.batches);
    row.spread = bd.interquartile;
    row.spread_kind = "batch_iqr";
    row.batch_median = bd.median;
    row.note = "diagnostic: infinite-variance estimator, stderr not reported";
  }
  if (row.heavy_tail) {
    if (!row.note.empty()) row.note += "; ";
    row.note += "warning: variance still growing with N";
  }
  return row;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::UsConst: return "us_const";
    case EstimatorKind::UsPath: return "us_path";
    case EstimatorKind::UsGeneral: return "us_general";
    case EstimatorKind::UsDriftless: return "us_driftless";
    case EstimatorKind::Euler: return "euler";
    case EstimatorKind::Mlmc: return "mlmc";
  }
  return "unknown";
}

EstimatorKind estimator_from_name(const std::string& name) {
  for (auto k : {EstimatorKind::UsConst, EstimatorKind::UsPath, EstimatorKind::UsGeneral,
                 EstimatorKind::UsDriftless, EstimatorKind::Euler, EstimatorKind::Mlmc}) {
    if (estimator_name(k) == name) return k;
  }
  throw ConfigError("unknown estimator \"" + name +
                    "\"; expected us_const, us_path, us_general, us_driftless, euler or mlmc");
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  validate(config);
  const CatalogEntry entry = resolve_problem(config);
  const EstimatorKind kind = config.estimator_set ? config.estimator : natural_estimator(entry.problem);
  const double beta = config.beta > 0.0 ? config.beta : entry.default_beta;

  ExperimentOutput out;
  ResultRow row;
  if (kind == EstimatorKind::Euler) {
    const GeneralProblem q = general_view(kind, entry.problem);
    SamplerOptions opt;
    opt.seed = config.seed;
    opt.samples = config.samples;
    opt.workers = config.workers;
    opt.policy = config.tolerant ? InvalidPolicy::Tolerant : InvalidPolicy::Strict;
    const SampleRun run = euler_mc(q, entry.payoff, config.dt, opt);
    fill_from_run(row, run);
    std::ostringstream os;
    os << "dt=" << config.dt;
    row.note = os.str();
  } else if (kind == EstimatorKind::Mlmc) {
    if (!(config.eps > 0.0)) throw ConfigError("mlmc needs --eps > 0");
    const GeneralProblem q = general_view(kind, entry.problem);
    MlmcConfig mc;
    mc.refinement = config.mlmc_refinement;
    mc.initial_samples = config.mlmc_initial;
    mc.epsilon = config.eps;
    mc.max_level = config.mlmc_max_level;
    mc.seed = config.seed;
    mc.workers = config.workers;
    mc.policy = config.tolerant ? InvalidPolicy::Tolerant : InvalidPolicy::Strict;
    const MlmcResult r = mlmc_giles(q, entry.payoff, mc);
    std::uint64_t n = 0, invalid = 0;
    for (const auto& lev : r.levels) {
      n += lev.stats.count();
      invalid += lev.stats.invalid();
    }
    row.n = n;
    row.mean = r.mean;
    row.spread = r.stderr_mean;
    row.wall_time_s = r.wall_seconds;
    row.cost_per_draw = static_cast<double>(r.total_steps) / static_cast<double>(n);
    row.invalid = invalid;
    std::ostringstream os;
    os << "levels=" << r.levels.size() << " eps=" << config.eps;
    row.note = os.str();
    out.mlmc_levels = r.levels;
  } else {
    row = run_us(config, entry, kind, beta);
  }
  row.experiment = config.experiment;
  row.method = estimator_name(kind);
  row.seed = config.seed;
  row.config_hash = config_hash(config);
  out.rows.push_back(row);
  return out;
}

ExperimentOutput beta_sweep(const ExperimentConfig& config, const std::vector<double>& betas) {
  if (betas.empty()) throw ConfigError("beta sweep: empty beta list");
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("beta sweep: every beta must be positive");
  }
  if (!(config.target_stderr > 0.0)) throw ConfigError("beta sweep: target stderr must be positive");
  const CatalogEntry entry = resolve_problem(config);
  double beta_star = kNaN;
  if (const auto* q = std::get_if<ConstVolProblem>(&entry.problem)) {
    beta_star = optimal_beta(gamma_bound(*q), q->lipschitz(), q->horizon()).beta_star;
  }
  ExperimentOutput out;
  for (double b : betas) {
    ExperimentConfig c = config;
    c.beta = b;
    ExperimentOutput one = run_experiment(c);
    for (auto& row : one.rows) {
      row.beta_star = beta_star;
      const double var = row.spread * row.spread * static_cast<double>(row.n);
      if (row.spread_kind == "stderr") {
        row.work_to_target = var * row.cost_per_draw / (config.target_stderr * config.target_stderr);
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  if (!c.problem.is_null()) j["problem"] = c.problem;
  j["params"] = {{"cap_M", c.params.cap_M},         {"strike", c.params.strike},
                 {"mu0", c.params.mu0},             {"sigma_bar", c.params.sigma_bar},
                 {"gbm_sigma", c.params.gbm_sigma}, {"dates", c.params.dates},
                 {"factor", c.params.factor}};
  if (c.estimator_set) j["estimator"] = estimator_name(c.estimator);
  j["beta"] = c.beta;
  j["n"] = c.samples;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["dt"] = c.dt;
  j["eps"] = c.eps;
  j["mlmc"] = {{"refinement", c.mlmc_refinement},
               {"initial_samples", c.mlmc_initial},
               {"max_level", c.mlmc_max_level}};
  j["batches"] = c.batches;
  j["tolerant"] = c.tolerant;
  j["target_stderr"] = c.target_stderr;
  j["out"] = c.out_path;
  j["format"] = c.format;
  j["mlmc_csv"] = c.mlmc_csv;
  return j;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "experiment") c.experiment = value.get<std::string>();
      else if (key == "problem") c.problem = value;
      else if (key == "params") c.params = catalog_params_from_json(value);
      else if (key == "estimator") {
        c.estimator = estimator_from_name(value.get<std::string>());
        c.estimator_set = true;
      }
      else if (key == "beta") c.beta = value.get<double>();
      else if (key == "n") c.samples = value.get<std::uint64_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "workers") c.workers = value.get<unsigned>();
      else if (key == "dt") c.dt = value.get<double>();
      else if (key == "eps") c.eps = value.get<double>();
      else if (key == "mlmc") {
        c.mlmc_refinement = value.value("refinement", c.mlmc_refinement);
        c.mlmc_initial = value.value("initial_samples", c.mlmc_initial);
        c.mlmc_max_level = value.value("max_level", c.mlmc_max_level);
      }
      else if (key == "batches") c.batches = value.get<int>();
      else if (key == "tolerant") c.tolerant = value.get<bool>();
      else if (key == "target_stderr") c.target_stderr = value.get<double>();
      else if (key == "out") c.out_path = value.get<std::string>();
      else if (key == "format") c.format = value.get<std::string>();
      else if (key == "mlmc_csv") c.mlmc_csv = value.get<std::string>();
      else throw ConfigError("config: unknown key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  json j = config_to_json(config);
  for (const char* k : {"workers", "out", "format", "mlmc_csv"}) j.erase(k);
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "experiment,method,N,mean,stderr_or_dispersion,dispersion_kind,batch_median,wall_time_s,"
        "beta,seed,config_hash,jumps_per_draw,cost_per_draw,invalid,variance_ratio,"
        "heavy_tail_warning,beta_star,work_to_target,note\n";
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << r.method << ',' << r.n << ',' << num(r.mean) << ','
       << num(r.spread) << ',' << r.spread_kind << ',' << num(r.batch_median) << ','
       << num(r.wall_time_s) << ',' << num(r.beta) << ',' << r.seed << ',' << r.config_hash << ','
       << num(r.jumps_per_draw) << ',' << num(r.cost_per_draw) << ',' << r.invalid << ','
       << num(r.variance_ratio) << ',' << (r.heavy_tail ? 1 : 0) << ',' << num(r.beta_star) << ','
       << num(r.work_to_target) << ',' << csv_field(r.note) << '\n';
  }
  return os.str();
}

std::string rows_to_json(const std::vector<ResultRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"experiment", r.experiment},
                   {"method", r.method},
                   {"N", r.n},
                   {"mean", nullable(r.mean)},
                   {"stderr_or_dispersion", nullable(r.spread)},
                   {"dispersion_kind", r.spread_kind},
                   {"batch_median", nullable(r.batch_median)},
                   {"wall_time_s", r.wall_time_s},
                   {"beta", nullable(r.beta)},
                   {"seed", r.seed},
                   {"config_hash", r.config_hash},
                   {"jumps_per_draw", r.jumps_per_draw},
                   {"cost_per_draw", r.cost_per_draw},
                   {"invalid", r.invalid},
                   {"variance_ratio", nullable(r.variance_ratio)},
                   {"heavy_tail_warning", r.heavy_tail},
                   {"beta_star", nullable(r.beta_star)},
                   {"work_to_target", nullable(r.work_to_target)},
                   {"note", r.note}});
  }
  return arr.dump(2) + "\n";
}

std::string mlmc_levels_csv(const std::vector<MlmcLevel>& levels) {
  std::ostringstream os;
  os << "level,N_l,mean_l,var_l\n";
  for (const auto& lev : levels) {
    os << lev.level << ',' << lev.stats.count() << ',' << num(lev.stats.mean()) << ','
       << num(lev.stats.variance()) << '\n';
  }
  return os.str();
}

}  // namespace usde
