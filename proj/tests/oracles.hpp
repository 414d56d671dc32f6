#pragma once

#include <cmath>

// Closed-form prices used as test oracles.
namespace oracle {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// E[(m + s Z − K)+]
inline double bachelier_call(double m, double s, double K) {
  const double d = (m - K) / s;
  return (m - K) * norm_cdf(d) + s * norm_pdf(d);
}

// Undiscounted E[(S_T − K)+] for S_T = S0 exp((r − σ²/2)T + σW_T).
inline double black_scholes_call(double s0, double K, double r, double sigma, double T) {
  const double v = sigma * std::sqrt(T);
  const double d1 = (std::log(s0 / K) + (r + 0.5 * sigma * sigma) * T) / v;
  return s0 * std::exp(r * T) * norm_cdf(d1) - K * norm_cdf(d1 - v);
}

}  // namespace oracle
