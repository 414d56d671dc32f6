#pragma once

#include "usde/estimator.hpp"
#include "usde/model.hpp"
#include "usde/randgrid.hpp"

namespace usde {

// (mu_curr − mu_prev) · (σ0ᵀ)⁻¹ dw_next / dt_next
double weight_w1_const(const Vec& mu_curr, const Vec& mu_prev, const Mat& sigma0_inv_t,
                       const Eigen::Ref<const Vec>& dw_next, double dt_next);

// One draw of the constant-diffusion estimator on a fresh arrival grid.
EstimatorDraw draw_psi_const(const ConstVolProblem& problem, const Payoff& payoff, double beta,
                             RngStream& stream);

// Same estimator on a given grid.
EstimatorDraw psi_const_on_grid(const ConstVolProblem& problem, const Payoff& payoff,
                                const ArrivalGrid& grid);

// 2(1 + |μ|∞√T)² Tr((σ0σ0ᵀ)⁻¹) + 2(3d + d(d−1))
double gamma_bound(const ConstVolProblem& problem);

struct BetaTuning {
  double gamma = 0.0;
  double lipschitz = 0.0;
  double horizon = 0.0;
  double beta_star = 0.0;
};

// Minimizer of beta_objective, (1 + √(1 + 4T²γL²)) / (2T); equals
// √(γL² + 1/4) + 1/2 at T = 1.
BetaTuning optimal_beta(double gamma, double lipschitz, double horizon);

// exp(T(β + γL²/β)) / (βT), the work-times-variance shape used for tuning.
double beta_objective(double beta, double gamma, double lipschitz, double horizon);

}  // namespace usde
