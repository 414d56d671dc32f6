#pragma once

#include "usde/estimator.hpp"
#include "usde/model.hpp"
#include "usde/randgrid.hpp"

namespace usde {

struct WeightPair {
  double w1 = 0.0;
  double w2 = 0.0;
  double sum() const { return w1 + w2; }
};

// Δμ · (σᵀ)⁻¹ dw_next / dt_next. Throws NumericError for an ill-conditioned σ.
double weight_w1_general(const Vec& dmu, const Mat& sigma_curr, const Eigen::Ref<const Vec>& dw_next,
                         double dt_next);

// Δa : [(σᵀ)⁻¹ (dw dwᵀ − dt·I) / dt² σ⁻¹] with a = ½σσᵀ.
double weight_w2_general(const Mat& da, const Mat& sigma_curr, const Eigen::Ref<const Vec>& dw_next,
                         double dt_next);

// Both weights from a precomputed (σᵀ)⁻¹. The second-order term is skipped
// when Δa is exactly zero.
WeightPair general_weights(const Vec& dmu, const Mat& da, const Mat& sigma_inv_t,
                           const Eigen::Ref<const Vec>& dw_next, double dt_next);

// One draw of the general-diffusion estimator. Its mean exists but its
// variance does not; summarize runs with batch medians, not standard errors.
EstimatorDraw draw_psi_general(const GeneralProblem& problem, const Payoff& payoff, double beta,
                               RngStream& stream);

EstimatorDraw psi_general_on_grid(const GeneralProblem& problem, const Payoff& payoff,
                                  const ArrivalGrid& grid);

}  // namespace usde
