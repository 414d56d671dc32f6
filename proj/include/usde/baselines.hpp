#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "usde/model.hpp"
#include "usde/sampler.hpp"

namespace usde {

// Number of Euler steps for step size dt; throws ConfigError unless dt
// divides the horizon up to 1e-9 relative.
int euler_step_count(double horizon, double dt);

// Payoff of one Euler path with `steps` equal steps.
EstimatorDraw euler_draw(const GeneralProblem& problem, const Payoff& payoff, int steps,
                         RngStream& stream);

// Fixed-step Euler Monte Carlo.
SampleRun euler_mc(const GeneralProblem& problem, const Payoff& payoff, double dt,
                   const SamplerOptions& options);
SampleRun euler_mc(const ConstVolProblem& problem, const Payoff& payoff, double dt,
                   const SamplerOptions& options);

struct MlmcConfig {
  int refinement = 4;                 // M
  std::uint64_t initial_samples = 10000;  // N_L
  std::uint64_t min_samples = 100;
  double epsilon = 1e-3;              // target root-mean-square error
  int max_level = 10;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  InvalidPolicy policy = InvalidPolicy::Strict;
};

// P_l − P_{l−1} on one Brownian path: the coarse path uses sums of
// `refinement` consecutive fine increments. Level 0 returns P_0.
struct LevelSample {
  double fine = 0.0;
  double coarse = 0.0;
  double difference = 0.0;
};
LevelSample mlmc_level_sample(const GeneralProblem& problem, const Payoff& payoff, int level,
                              int refinement, RngStream& stream);

struct MlmcLevel {
  int level = 0;
  RunStats stats;  // of P_l − P_{l−1}
  double step = 0.0;
};

struct MlmcResult {
  double mean = 0.0;
  // √(Σ V_l / N_l)
  double stderr_mean = 0.0;
  std::vector<MlmcLevel> levels;
  double wall_seconds = 0.0;
  std::uint64_t total_steps = 0;
};

// Multilevel Euler estimator with adaptive level count and sample allocation.
// Throws ConvergenceError if the bias test still fails at max_level.
MlmcResult mlmc_giles(const GeneralProblem& problem, const Payoff& payoff, const MlmcConfig& config);

struct PdeGrid {
  int nodes = 801;        // odd, so x0 sits on the centre node
  int time_steps = 400;
  double half_width = 0.0;  // 0: 8·σ_max·√T
  int rannacher_steps = 2;  // leading steps replaced by twice as many implicit half-steps
  // An error estimate above this throws ConvergenceError.
  double tolerance = std::numeric_limits<double>::infinity();
};

struct PdeResult {
  double value = 0.0;           // fine-grid value
  double coarse_value = 0.0;
  double error_estimate = 0.0;  // |fine − coarse| / 3
  double lower = 0.0;
  double upper = 0.0;
};

// Crank–Nicolson solution of u_t + μ u_x + ½σ² u_xx = 0, u(T) = g, at (0, x0).
// Solves on `grid` and on a grid refined twice in space and time.
PdeResult fd_pde_oracle_1d(double x0, double horizon, const ScalarFieldFn& mu,
                           const ScalarFieldFn& sigma, const std::function<double(double)>& g,
                           const PdeGrid& grid = {});
PdeResult fd_pde_oracle(const Driftless1dProblem& problem, const Payoff& payoff,
                        const PdeGrid& grid = {});
PdeResult fd_pde_oracle(const ConstVolProblem& problem, const Payoff& payoff, const PdeGrid& grid = {});

}  // namespace usde
