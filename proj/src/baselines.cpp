#include "usde/baselines.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "usde/errors.hpp"
#include "usde/estimator.hpp"

namespace usde {

int euler_step_count(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("euler: need dt > 0 and horizon > 0");
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "euler: dt = " << dt << " does not divide the horizon " << horizon;
    throw ConfigError(os.str());
  }
  return static_cast<int>(steps);
}

EstimatorDraw euler_draw(const GeneralProblem& problem, const Payoff& payoff, int steps,
                         RngStream& stream) {
  const int d = problem.dimension();
  const double h = problem.horizon() / steps;
  const double sqrt_h = std::sqrt(h);
  Vec x = problem.x0();
  Vec mu(d), dw(d);
  Mat sigma(d, d);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    problem.drift(t, x, mu);
    problem.diffusion(t, x, sigma);
    for (int i = 0; i < d; ++i) dw[i] = sqrt_h * stream.normal();
    euler_step(x, mu, h, sigma, dw);
  }
  EstimatorDraw draw;
  draw.value = payoff(x);
  draw.gaussians = static_cast<std::uint64_t>(d) * steps;
  draw.cost_units = 2 * static_cast<std::uint64_t>(steps) + 1;
  draw.valid = std::isfinite(draw.value);
  return draw;
}

SampleRun euler_mc(const GeneralProblem& problem, const Payoff& payoff, double dt,
                   const SamplerOptions& options) {
  const int steps = euler_step_count(problem.horizon(), dt);
  return run_samples(options,
                     [&](RngStream& s) { return euler_draw(problem, payoff, steps, s); });
}

SampleRun euler_mc(const ConstVolProblem& problem, const Payoff& payoff, double dt,
                   const SamplerOptions& options) {
  return euler_mc(as_general(problem), payoff, dt, options);
}

LevelSample mlmc_level_sample(const GeneralProblem& problem, const Payoff& payoff, int level,
                              int refinement, RngStream& stream) {
  const int d = problem.dimension();
  long long fine_steps = 1;
  for (int l = 0; l < level; ++l) fine_steps *= refinement;
  const double hf = problem.horizon() / static_cast<double>(fine_steps);
  const double hc = hf * refinement;
  const double sqrt_hf = std::sqrt(hf);

  Vec xf = problem.x0();
  Vec xc = problem.x0();
  Vec mu(d), dw(d), dw_coarse = Vec::Zero(d);
  Mat sigma(d, d);
  for (long long s = 0; s < fine_steps; ++s) {
    problem.drift(s * hf, xf, mu);
    problem.diffusion(s * hf, xf, sigma);
    for (int i = 0; i < d; ++i) dw[i] = sqrt_hf * stream.normal();
    euler_step(xf, mu, hf, sigma, dw);
    if (level == 0) continue;
    dw_coarse += dw;
    if ((s + 1) % refinement == 0) {
      const double tc = (s + 1 - refinement) * hf;
      problem.drift(tc, xc, mu);
      problem.diffusion(tc, xc, sigma);
      euler_step(xc, mu, hc, sigma, dw_coarse);
      dw_coarse.setZero();
    }
  }
  LevelSample out;
  out.fine = payoff(xf);
  out.coarse = level == 0 ? 0.0 : payoff(xc);
  out.difference = out.fine - out.coarse;
  return out;
}

MlmcResult mlmc_giles(const GeneralProblem& problem, const Payoff& payoff, const MlmcConfig& config) {
  if (config.refinement < 2) throw ConfigError("mlmc: refinement factor must be at least 2");
  if (!(config.epsilon > 0.0)) throw ConfigError("mlmc: epsilon must be positive");
  if (config.initial_samples < 2 || config.min_samples < 2) {
    throw ConfigError("mlmc: need at least two samples per level");
  }
  if (config.max_level < 2) throw ConfigError("mlmc: max level must be at least 2");
  const auto started = std::chrono::steady_clock::now();
  const double M = config.refinement;
  const double eps = config.epsilon;

  MlmcResult result;
  auto sample_level = [&](MlmcLevel& lev, std::uint64_t extra) {
    SamplerOptions opt;
    opt.seed = derive_seed(config.seed, static_cast<std::uint64_t>(lev.level));
    opt.samples = extra;
    opt.first_index = lev.stats.count() + lev.stats.invalid();
    opt.workers = config.workers;
    opt.policy = config.policy;
    const int level = lev.level;
    const std::uint64_t steps = static_cast<std::uint64_t>(std::llround(problem.horizon() / lev.step));
    const SampleRun run = run_samples(opt, [&](RngStream& s) {
      EstimatorDraw d;
      d.value = mlmc_level_sample(problem, payoff, level, config.refinement, s).difference;
      d.cost_units = level == 0 ? steps : steps + steps / config.refinement;
      d.gaussians = steps * problem.dimension();
      d.valid = std::isfinite(d.value);
      return d;
    });
    lev.stats.merge(run.stats);
    result.total_steps += extra * steps;
  };

  bool converged = false;
  for (int L = 0; !converged; ++L) {
    MlmcLevel fresh;
    fresh.level = L;
    fresh.step = problem.horizon() / std::pow(M, L);
    result.levels.push_back(fresh);
    sample_level(result.levels.back(), config.initial_samples);

    double sum = 0.0;
    for (const auto& lev : result.levels) sum += std::sqrt(lev.stats.variance() / lev.step);
    for (auto& lev : result.levels) {
      const double target =
          std::ceil(2.0 / (eps * eps) * std::sqrt(lev.stats.variance() * lev.step) * sum);
      const std::uint64_t wanted =
          std::max<std::uint64_t>(config.min_samples, static_cast<std::uint64_t>(target));
      if (wanted > lev.stats.count()) sample_level(lev, wanted - lev.stats.count());
    }

    if (L >= 2) {
      const double y_prev = std::abs(result.levels[L - 1].stats.mean()) / M;
      const double y_last = std::abs(result.levels[L].stats.mean());
      converged = std::max(y_prev, y_last) < (M - 1.0) * eps / std::sqrt(2.0);
    }
    if (!converged && L == config.max_level) {
      std::ostringstream os;
      os << "mlmc: bias test still fails at max level " << config.max_level << " (epsilon "
         << eps << ")";
      throw ConvergenceError(os.str());
    }
  }

  double var = 0.0;
  for (const auto& lev : result.levels) {
    result.mean += lev.stats.mean();
    var += lev.stats.variance() / static_cast<double>(lev.stats.count());
  }
  result.stderr_mean = std::sqrt(var);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace usde
