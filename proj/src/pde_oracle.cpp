#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "usde/baselines.hpp"
#include "usde/errors.hpp"

namespace usde {

namespace {

// Solves a[i] u[i−1] + b[i] u[i] + c[i] u[i+1] = r[i] in place (r becomes u).
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
            std::vector<double>& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  r[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] - c[i] * r[i + 1]) / b[i];
}

struct Domain {
  double lo = 0.0;
  double hi = 0.0;
};

Domain choose_domain(double x0, double horizon, const ScalarFieldFn& sigma, double half_width) {
  if (half_width > 0.0) return {x0 - half_width, x0 + half_width};
  double smax = std::abs(sigma(0.0, x0));
  double width = 0.0;
  for (int iter = 0; iter < 8; ++iter) {
    width = 8.0 * smax * std::sqrt(horizon);
    double next = smax;
    const int probes = 201;
    for (int j = 0; j < probes; ++j) {
      const double x = x0 - width + 2.0 * width * j / (probes - 1);
      for (double t : {0.0, 0.5 * horizon, horizon}) next = std::max(next, std::abs(sigma(t, x)));
    }
    if (next <= smax * (1.0 + 1e-12)) break;
    smax = next;
  }
  if (!(width > 0.0)) throw DomainError("pde oracle: zero volatility, no domain to solve on");
  return {x0 - width, x0 + width};
}

double solve(double horizon, const ScalarFieldFn& mu, const ScalarFieldFn& sigma,
             const std::function<double(double)>& g, Domain dom, int nodes, int steps,
             int rannacher) {
  const double dx = (dom.hi - dom.lo) / (nodes - 1);
  std::vector<double> x(nodes), u(nodes);
  for (int i = 0; i < nodes; ++i) {
    x[i] = dom.lo + dx * i;
    u[i] = g(x[i]);
  }
  const int inner = nodes - 2;
  std::vector<double> a(inner), b(inner), c(inner), r(inner);
  std::vector<double> lo(nodes), di(nodes), up(nodes);

  // One θ-step backward in time from t_hi to t_hi − dt.
  auto step = [&](double t_hi, double dt, double theta) {
    const double t_mid = t_hi - 0.5 * dt;
    for (int i = 1; i < nodes - 1; ++i) {
      const double m = mu(t_mid, x[i]);
      const double s = sigma(t_mid, x[i]);
      const double diff = 0.5 * s * s / (dx * dx);
      const double conv = 0.5 * m / dx;
      lo[i] = diff - conv;
      di[i] = -2.0 * diff;
      up[i] = diff + conv;
    }
    for (int i = 1; i < nodes - 1; ++i) {
      const int k = i - 1;
      r[k] = u[i] + (1.0 - theta) * dt * (lo[i] * (u[i - 1] - u[i]) + up[i] * (u[i + 1] - u[i]));
      a[k] = -theta * dt * lo[i];
      b[k] = 1.0 - theta * dt * di[i];
      c[k] = -theta * dt * up[i];
    }
    // u_0 = 2u_1 − u_2 and u_{n−1} = 2u_{n−2} − u_{n−3}.
    b[0] += 2.0 * a[0];
    c[0] -= a[0];
    a[0] = 0.0;
    b[inner - 1] += 2.0 * c[inner - 1];
    a[inner - 1] -= c[inner - 1];
    c[inner - 1] = 0.0;
    thomas(a, b, c, r);
    for (int k = 0; k < inner; ++k) u[k + 1] = r[k];
    u[0] = 2.0 * u[1] - u[2];
    u[nodes - 1] = 2.0 * u[nodes - 2] - u[nodes - 3];
  };

  const double dt = horizon / steps;
  double t = horizon;
  const int startup = std::min(rannacher, steps);
  for (int s = 0; s < startup; ++s) {
    step(t, 0.5 * dt, 1.0);
    step(t - 0.5 * dt, 0.5 * dt, 1.0);
    t = horizon - (s + 1) * dt;
  }
  for (int s = startup; s < steps; ++s) {
    step(t, dt, 0.5);
    t = horizon - (s + 1) * dt;
  }
  const int centre = (nodes - 1) / 2;
  return u[centre];
}

}  // namespace

PdeResult fd_pde_oracle_1d(double x0, double horizon, const ScalarFieldFn& mu,
                           const ScalarFieldFn& sigma, const std::function<double(double)>& g,
                           const PdeGrid& grid) {
  if (grid.nodes < 5 || grid.nodes % 2 == 0) throw ConfigError("pde oracle: nodes must be odd and >= 5");
  if (grid.time_steps < 1) throw ConfigError("pde oracle: need at least one time step");
  if (!(horizon > 0.0)) throw ConfigError("pde oracle: horizon must be positive");
  const Domain dom = choose_domain(x0, horizon, sigma, grid.half_width);

  PdeResult out;
  out.lower = dom.lo;
  out.upper = dom.hi;
  out.coarse_value = solve(horizon, mu, sigma, g, dom, grid.nodes, grid.time_steps, grid.rannacher_steps);
  out.value = solve(horizon, mu, sigma, g, dom, 2 * grid.nodes - 1, 2 * grid.time_steps,
                    2 * grid.rannacher_steps);
  out.error_estimate = std::abs(out.value - out.coarse_value) / 3.0;
  if (out.error_estimate > grid.tolerance) {
    std::ostringstream os;
    os << "pde oracle: error estimate " << out.error_estimate << " exceeds tolerance "
       << grid.tolerance << " at " << grid.nodes << " nodes, " << grid.time_steps << " steps";
    throw ConvergenceError(os.str());
  }
  return out;
}

PdeResult fd_pde_oracle(const Driftless1dProblem& problem, const Payoff& payoff, const PdeGrid& grid) {
  Vec buf(1);
  return fd_pde_oracle_1d(
      problem.x0(), problem.horizon(), [](double, double) { return 0.0; }, problem.sigma_fn(),
      [&](double x) {
        buf[0] = x;
        return payoff(buf);
      },
      grid);
}

PdeResult fd_pde_oracle(const ConstVolProblem& problem, const Payoff& payoff, const PdeGrid& grid) {
  if (problem.dimension() != 1) throw ConfigError("pde oracle: problem must be one-dimensional");
  const double s0 = problem.sigma0()(0, 0);
  Vec in(1), out(1), buf(1);
  return fd_pde_oracle_1d(
      problem.x0()[0], problem.horizon(),
      [&](double t, double x) {
        in[0] = x;
        problem.drift(t, in, out);
        return out[0];
      },
      [s0](double, double) { return s0; },
      [&](double x) {
        buf[0] = x;
        return payoff(buf);
      },
      grid);
}

}  // namespace usde
