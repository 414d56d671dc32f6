#pragma once

#include <string>
#include <vector>

#include "usde/model.hpp"

namespace usde {

struct CatalogParams {
  // Cap in min(M, e^x); large enough to be invisible at the benchmark scales.
  double cap_M = 1e6;
  double strike = 1.0;
  double mu0 = 0.2;         // sine model drift scale
  double sigma_bar = 0.4;   // table5 volatility scale; gbm uses its own default
  double gbm_sigma = 0.2;
  int dates = 10;
  // Square root of the ½-correlation matrix used by table3/table4:
  // "upper" (Lᵀ, the default) or "lower" (L, so σ0σ0ᵀ is the correlation).
  std::string factor = "upper";
};

struct CatalogEntry {
  std::string name;
  AnyProblem problem;
  // Terminal payoff. Path problems carry their own payoff; this one is unset.
  Payoff payoff;
  double default_beta = 0.1;
  std::string description;
};

std::vector<std::string> catalog_names();

// Throws LookupError listing the available names for an unknown name.
CatalogEntry catalog_lookup(const std::string& name, const CatalogParams& params = {});

// Payoff building blocks shared with the JSON loader.
Payoff call_payoff(double strike);                       // (x_0 − K)+
Payoff put_payoff(double strike);                        // (K − x_0)+
Payoff exp_call_payoff(double strike, double cap_M);     // (mean_i min(M, e^{x_i}) − K)+
Payoff linear_payoff(Vec weights, double offset);        // w·x + c
Payoff constant_payoff(double c);
Payoff sin_payoff();                                     // sin(x_0)

// d×d square root of the matrix with unit diagonal and ½ off the diagonal.
Mat half_correlation_factor(int d, const std::string& factor);

}  // namespace usde
