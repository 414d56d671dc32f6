#pragma once

#include <cmath>
#include <cstdint>

#include "usde/linalg.hpp"

namespace usde {

// One realized estimator value with its cost counters.
struct EstimatorDraw {
  double value = 0.0;
  int jumps = 0;
  std::uint64_t gaussians = 0;
  // Coefficient evaluations plus weight evaluations.
  std::uint64_t cost_units = 0;
  bool valid = true;
};

enum class InvalidPolicy {
  Strict,    // any non-finite draw aborts the run
  Tolerant,  // counted and skipped
};

// e^{β·span} · difference · β^{−jumps} · weight_product.
// Every estimator assembles its draw through this one expression.
inline double renormalized(double beta, double span, int jumps, double difference,
                           double weight_product) {
  return std::exp(beta * span) * difference * std::pow(beta, -jumps) * weight_product;
}

// x ← x + mu·dt + sigma·dw
inline void euler_step(Vec& x, const Vec& mu, double dt, const Mat& sigma,
                       const Eigen::Ref<const Vec>& dw) {
  x = x + mu * dt + sigma * dw;
}

// dmu · inv_t·dw / dt, with inv_t = (σᵀ)⁻¹.
inline double first_order_weight(const Vec& dmu, const Mat& inv_t, const Eigen::Ref<const Vec>& dw,
                                 double dt) {
  return dmu.dot(inv_t * dw) / dt;
}

}  // namespace usde
