#include "usde/est_const.hpp"

#include <cmath>

#include "usde/errors.hpp"

namespace usde {

double weight_w1_const(const Vec& mu_curr, const Vec& mu_prev, const Mat& sigma0_inv_t,
                       const Eigen::Ref<const Vec>& dw_next, double dt_next) {
  return first_order_weight(mu_curr - mu_prev, sigma0_inv_t, dw_next, dt_next);
}

EstimatorDraw psi_const_on_grid(const ConstVolProblem& problem, const Payoff& payoff,
                                const ArrivalGrid& grid) {
  const int d = problem.dimension();
  const int n = grid.jumps();
  const Mat& sigma0 = problem.sigma0();
  const Mat& inv_t = problem.sigma0_inv_transpose();

  Vec x = problem.x0();
  Vec x_last;
  Vec mu(d), mu_prev(d);
  double prod = 1.0;
  for (int k = 0; k <= n; ++k) {
    problem.drift(grid.times[k], x, mu);
    if (k > 0) prod *= weight_w1_const(mu, mu_prev, inv_t, grid.dw.col(k), grid.dt[k]);
    if (k == n) x_last = x;
    euler_step(x, mu, grid.dt[k], sigma0, grid.dw.col(k));
    mu_prev.swap(mu);
  }

  const double g_end = payoff(x);
  const double g_last = n > 0 ? payoff(x_last) : 0.0;

  EstimatorDraw draw;
  draw.value = renormalized(grid.beta, grid.horizon, n, g_end - g_last, prod);
  draw.jumps = n;
  draw.gaussians = static_cast<std::uint64_t>(d) * (n + 1);
  draw.cost_units = static_cast<std::uint64_t>(2 * n + 1 + (n > 0 ? 2 : 1));
  draw.valid = std::isfinite(draw.value);
  return draw;
}

EstimatorDraw draw_psi_const(const ConstVolProblem& problem, const Payoff& payoff, double beta,
                             RngStream& stream) {
  const ArrivalGrid grid = sample_arrival_grid(beta, problem.horizon(), problem.dimension(), stream);
  return psi_const_on_grid(problem, payoff, grid);
}

double gamma_bound(const ConstVolProblem& problem) {
  const double d = problem.dimension();
  const double lead = 1.0 + problem.mu_sup() * std::sqrt(problem.horizon());
  return 2.0 * lead * lead * problem.covariance_inverse().trace() + 2.0 * (3.0 * d + d * (d - 1.0));
}

BetaTuning optimal_beta(double gamma, double lipschitz, double horizon) {
  if (!(gamma > 0.0) || !(lipschitz >= 0.0) || !(horizon > 0.0)) {
    throw ConfigError("optimal_beta: need gamma > 0, L >= 0, T > 0");
  }
  BetaTuning out;
  out.gamma = gamma;
  out.lipschitz = lipschitz;
  out.horizon = horizon;
  // Positive root of Tβ² − β − TγL² = 0.
  const double gl2 = gamma * lipschitz * lipschitz;
  out.beta_star = (1.0 + std::sqrt(1.0 + 4.0 * horizon * horizon * gl2)) / (2.0 * horizon);
  return out;
}

double beta_objective(double beta, double gamma, double lipschitz, double horizon) {
  return std::exp(horizon * (beta + gamma * lipschitz * lipschitz / beta)) / (beta * horizon);
}

}  // namespace usde
