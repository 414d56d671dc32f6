#include "usde/est_general.hpp"

#include <cmath>

namespace usde {

namespace {

double second_order_weight(const Mat& da, const Mat& inv_t, const Eigen::Ref<const Vec>& dw,
                           double dt) {
  const Eigen::Index d = dw.size();
  const Mat kernel = (dw * dw.transpose() - dt * Mat::Identity(d, d)) / (dt * dt);
  return frobenius_product(da, inv_t * kernel * inv_t.transpose());
}

}  // namespace

double weight_w1_general(const Vec& dmu, const Mat& sigma_curr, const Eigen::Ref<const Vec>& dw_next,
                         double dt_next) {
  return first_order_weight(dmu, inverse_transpose(sigma_curr), dw_next, dt_next);
}

double weight_w2_general(const Mat& da, const Mat& sigma_curr, const Eigen::Ref<const Vec>& dw_next,
                         double dt_next) {
  return second_order_weight(da, inverse_transpose(sigma_curr), dw_next, dt_next);
}

WeightPair general_weights(const Vec& dmu, const Mat& da, const Mat& sigma_inv_t,
                           const Eigen::Ref<const Vec>& dw_next, double dt_next) {
  WeightPair w;
  w.w1 = first_order_weight(dmu, sigma_inv_t, dw_next, dt_next);
  if (!(da.array() == 0.0).all()) w.w2 = second_order_weight(da, sigma_inv_t, dw_next, dt_next);
  return w;
}

EstimatorDraw psi_general_on_grid(const GeneralProblem& problem, const Payoff& payoff,
                                  const ArrivalGrid& grid) {
  const int d = problem.dimension();
  const int n = grid.jumps();

  Vec x = problem.x0();
  Vec x_last;
  Vec mu(d), mu_prev(d);
  Mat sigma(d, d);
  Mat a, a_prev;
  double prod = 1.0;
  std::uint64_t cost = 0;
  for (int k = 0; k <= n; ++k) {
    problem.drift(grid.times[k], x, mu);
    problem.diffusion(grid.times[k], x, sigma);
    cost += 2;
    if (n > 0) a = 0.5 * sigma * sigma.transpose();
    if (k > 0) {
      const WeightPair w =
          general_weights(mu - mu_prev, a - a_prev, inverse_transpose(sigma), grid.dw.col(k), grid.dt[k]);
      prod *= w.sum();
      cost += 2;
    }
    if (k == n) x_last = x;
    euler_step(x, mu, grid.dt[k], sigma, grid.dw.col(k));
    mu_prev.swap(mu);
    a_prev.swap(a);
  }

  const double g_end = payoff(x);
  const double g_last = n > 0 ? payoff(x_last) : 0.0;

  EstimatorDraw draw;
  draw.value = renormalized(grid.beta, grid.horizon, n, g_end - g_last, prod);
  draw.jumps = n;
  draw.gaussians = static_cast<std::uint64_t>(d) * (n + 1);
  draw.cost_units = cost + (n > 0 ? 2 : 1);
  draw.valid = std::isfinite(draw.value);
  return draw;
}

EstimatorDraw draw_psi_general(const GeneralProblem& problem, const Payoff& payoff, double beta,
                               RngStream& stream) {
  const ArrivalGrid grid = sample_arrival_grid(beta, problem.horizon(), problem.dimension(), stream);
  return psi_general_on_grid(problem, payoff, grid);
}

}  // namespace usde
