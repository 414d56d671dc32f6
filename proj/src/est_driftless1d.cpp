#include "usde/est_driftless1d.hpp"

#include <cmath>
#include <sstream>

#include "usde/errors.hpp"

namespace usde {

LinearCoeffs linear_coeffs(const Driftless1dProblem& problem, double t, double x) {
  LinearCoeffs c;
  c.t = t;
  c.x = x;
  c.sigma = problem.sigma(t, x);
  if (!(c.sigma >= problem.epsilon())) {
    std::ostringstream os;
    os << "linear_coeffs: sigma(" << t << ", " << x << ") = " << c.sigma << " is below epsilon";
    throw DomainError(os.str());
  }
  c.c2 = problem.dsigma_dx(t, x);
  c.c1 = c.sigma - c.c2 * x;
  return c;
}

LinStepOut linear_step(const LinearCoeffs& coeffs, double x, double dt, double dw) {
  LinStepOut out;
  const double c2 = coeffs.c2;
  if (std::abs(c2) * std::sqrt(dt) > kLinearBranchThreshold) {
    const double level = coeffs.c1 / c2 + x;
    const double drift = -0.5 * c2 * c2 * dt;
    out.forward = x + level * std::expm1(drift + c2 * dw);
    out.antithetic = x + level * std::expm1(drift - c2 * dw);
  } else {
    const double s = coeffs.c1 + c2 * x;
    out.forward = x + s * dw;
    out.antithetic = x - s * dw;
  }
  out.sigma_tilde = coeffs.c1 + c2 * out.forward;
  out.a_tilde = 0.5 * out.sigma_tilde * out.sigma_tilde;
  return out;
}

double weight_w2_lin(double a_curr, double a_tilde, double dsigma_curr, double dw_next,
                     double dt_next) {
  const double hermite = -dsigma_curr * dw_next / dt_next +
                         (dw_next * dw_next - dt_next) / (dt_next * dt_next);
  return (a_curr - a_tilde) / (2.0 * a_curr) * hermite;
}

AntitheticDraw psi_pair_on_grid(const Driftless1dProblem& problem, const Payoff& payoff,
                                const ArrivalGrid& grid) {
  if (grid.dimension() != 1) throw ConfigError("psi_pair_on_grid: grid must be one-dimensional");
  const int n = grid.jumps();
  Vec x(1);
  x[0] = problem.x0();
  Vec x_last(1);
  Vec x_anti(1);
  double a_tilde = 0.0;
  double prod = 1.0;       // weights 1..n−1
  double w_last = 1.0;     // weight n
  double w_last_anti = 1.0;
  for (int k = 0; k <= n; ++k) {
    const LinearCoeffs c = linear_coeffs(problem, grid.times[k], x[0]);
    const double dt = grid.dt[k];
    const double dw = grid.dw(0, k);
    if (k > 0) {
      const double a = 0.5 * c.sigma * c.sigma;
      if (k < n) {
        prod *= weight_w2_lin(a, a_tilde, c.c2, dw, dt);
      } else {
        w_last = weight_w2_lin(a, a_tilde, c.c2, dw, dt);
        w_last_anti = weight_w2_lin(a, a_tilde, c.c2, -dw, dt);
      }
    }
    const LinStepOut step = linear_step(c, x[0], dt, dw);
    if (k == n) {
      x_last = x;
      x_anti[0] = step.antithetic;
    }
    x[0] = step.forward;
    a_tilde = step.a_tilde;
  }

  const double g_end = payoff(x);
  const double g_anti = payoff(x_anti);
  const double g_last = n > 0 ? payoff(x_last) : 0.0;

  AntitheticDraw out;
  out.terminal = x[0];
  out.terminal_antithetic = x_anti[0];
  out.forward = renormalized(grid.beta, grid.horizon, n, g_end - g_last, prod * w_last);
  out.antithetic = renormalized(grid.beta, grid.horizon, n, g_anti - g_last, prod * w_last_anti);
  EstimatorDraw& draw = out.averaged;
  draw.value = 0.5 * (out.forward + out.antithetic);
  draw.jumps = n;
  draw.gaussians = static_cast<std::uint64_t>(n + 1);
  draw.cost_units = static_cast<std::uint64_t>(2 * (n + 1) + n + 1 + (n > 0 ? 3 : 2));
  draw.valid = std::isfinite(draw.value);
  return out;
}

AntitheticDraw draw_psi_pair(const Driftless1dProblem& problem, const Payoff& payoff, double beta,
                             RngStream& stream) {
  const ArrivalGrid grid = sample_arrival_grid(beta, problem.horizon(), 1, stream);
  return psi_pair_on_grid(problem, payoff, grid);
}

EstimatorDraw draw_psi_bar(const Driftless1dProblem& problem, const Payoff& payoff, double beta,
                           RngStream& stream) {
  return draw_psi_pair(problem, payoff, beta, stream).averaged;
}

}  // namespace usde
