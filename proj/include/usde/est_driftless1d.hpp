#pragma once

#include "usde/estimator.hpp"
#include "usde/model.hpp"
#include "usde/randgrid.hpp"

namespace usde {

// σ linearized at an anchor: σ(t, y) ≈ c1 + c2·y.
struct LinearCoeffs {
  double c1 = 0.0;
  double c2 = 0.0;
  double t = 0.0;
  double x = 0.0;
  double sigma = 0.0;
};

// c1 = σ − ∂xσ·x, c2 = ∂xσ. Throws DomainError if σ(t, x) < ε.
LinearCoeffs linear_coeffs(const Driftless1dProblem& problem, double t, double x);

struct LinStepOut {
  double forward = 0.0;
  // Same step with the increment negated.
  double antithetic = 0.0;
  // c1 + c2·forward and ½ of its square, used by the next weight.
  double sigma_tilde = 0.0;
  double a_tilde = 0.0;
};

// |c2|·√dt at or below this uses the constant-coefficient step.
inline constexpr double kLinearBranchThreshold = 1e-8;

// Exact solution of dY = (c1 + c2·Y) dW over one step from x.
LinStepOut linear_step(const LinearCoeffs& coeffs, double x, double dt, double dw);

// ((a − ã)/(2a)) · (−∂xσ·dw/dt + (dw² − dt)/dt²). Passing −dw gives the
// antithetic variant.
double weight_w2_lin(double a_curr, double a_tilde, double dsigma_curr, double dw_next,
                     double dt_next);

struct AntitheticDraw {
  double forward = 0.0;     // ψ̂
  double antithetic = 0.0;  // ψ̂⁻, the last increment negated
  double terminal = 0.0;
  double terminal_antithetic = 0.0;
  EstimatorDraw averaged;   // ψ̄ = (ψ̂ + ψ̂⁻)/2
};

AntitheticDraw draw_psi_pair(const Driftless1dProblem& problem, const Payoff& payoff, double beta,
                             RngStream& stream);

AntitheticDraw psi_pair_on_grid(const Driftless1dProblem& problem, const Payoff& payoff,
                                const ArrivalGrid& grid);

// The antithetic average only.
EstimatorDraw draw_psi_bar(const Driftless1dProblem& problem, const Payoff& payoff, double beta,
                           RngStream& stream);

}  // namespace usde
