#pragma once

#include "usde/model.hpp"

namespace usde {

struct LampertiOptions {
  // Lower limit of the integral defining h, so h(t, reference) = 0.
  double reference = 0.0;
  // Search bracket for h⁻¹; h must be defined on all of it.
  double bracket_lo = -1e3;
  double bracket_hi = 1e3;
  double inverse_tolerance = 1e-12;
  double quadrature_tolerance = 1e-10;
};

// One-dimensional change of variable Y = h(t, X), h(t, x) = ∫ dy / sigma(t, y),
// turning dX = mu dt + sigma dW into dY = drift(t, Y) dt + dW.
class LampertiTransform {
 public:
  // dsigma_dt may be empty for time-homogeneous sigma.
  LampertiTransform(ScalarFieldFn sigma, ScalarFieldFn dsigma_dx, ScalarFieldFn dsigma_dt,
                    ScalarFieldFn mu, LampertiOptions options = {});

  double h(double t, double x) const;
  double dh_dt(double t, double x) const;
  double h_inverse(double t, double y) const;
  // ∂t h + mu/sigma − ½ ∂x sigma, evaluated at x = h⁻¹(t, y).
  double drift(double t, double y) const;

  DriftFn drift_fn() const;

  // The transformed constant-diffusion problem started at h(0, x0).
  // L and |mu|_inf are declared by the caller.
  ConstVolProblem to_problem(double x0, double horizon, double lipschitz_L, double mu_sup) const;

  const LampertiOptions& options() const { return options_; }

 private:
  double integral_inverse_sigma(double t, double a, double b) const;

  ScalarFieldFn sigma_;
  ScalarFieldFn dsigma_dx_;
  ScalarFieldFn dsigma_dt_;
  ScalarFieldFn mu_;
  LampertiOptions options_;
};

LampertiTransform lamperti_1d(ScalarFieldFn sigma, ScalarFieldFn dsigma_dx, ScalarFieldFn dsigma_dt,
                              ScalarFieldFn mu, LampertiOptions options = {});

}  // namespace usde
