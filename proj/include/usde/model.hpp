#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "usde/linalg.hpp"

namespace usde {

// Coefficient evaluators write into a caller-owned output so that hot loops
// do not allocate. Evaluators must be pure: callable concurrently, same
// inputs give the same outputs.
using DriftFn = std::function<void(double t, const Vec& x, Vec& out)>;
using DiffusionFn = std::function<void(double t, const Vec& x, Mat& out)>;
using ScalarFieldFn = std::function<double(double t, double x)>;

// Drift of a path-dependent SDE. `path` holds one state per monitoring date;
// on [t_{k-1}, t_k) only slots 0..k-1 may differ, later slots equal the
// current state.
using PathDriftFn = std::function<void(double t, std::span<const Vec> path, Vec& out)>;
using PathPayoffFn = std::function<double(std::span<const Vec> path)>;

struct Payoff {
  std::function<double(const Vec&)> g;
  double lipschitz = 0.0;

  double operator()(const Vec& x) const { return g(x); }
};

// dX = mu(t, X) dt + sigma0 dW with a constant non-degenerate sigma0.
class ConstVolProblem {
 public:
  ConstVolProblem(Vec x0, DriftFn mu, Mat sigma0, double horizon, double lipschitz_L, double mu_sup);

  int dimension() const { return static_cast<int>(x0_.size()); }
  const Vec& x0() const { return x0_; }
  double horizon() const { return horizon_; }
  const Mat& sigma0() const { return sigma0_; }
  // (sigma0ᵀ)⁻¹
  const Mat& sigma0_inv_transpose() const { return sigma0_inv_t_; }
  // (sigma0 sigma0ᵀ)⁻¹
  const Mat& covariance_inverse() const { return cov_inv_; }
  double lipschitz() const { return lipschitz_; }
  double mu_sup() const { return mu_sup_; }
  const DriftFn& drift_fn() const { return mu_; }

  void drift(double t, const Vec& x, Vec& out) const { mu_(t, x, out); }

 private:
  Vec x0_;
  DriftFn mu_;
  Mat sigma0_;
  Mat sigma0_inv_t_;
  Mat cov_inv_;
  double horizon_;
  double lipschitz_;
  double mu_sup_;
};

// dX = mu(t, X) dt + sigma(t, X) dW.
class GeneralProblem {
 public:
  GeneralProblem(Vec x0, DriftFn mu, DiffusionFn sigma, double horizon);

  int dimension() const { return static_cast<int>(x0_.size()); }
  const Vec& x0() const { return x0_; }
  double horizon() const { return horizon_; }

  void drift(double t, const Vec& x, Vec& out) const { mu_(t, x, out); }
  void diffusion(double t, const Vec& x, Mat& out) const { sigma_(t, x, out); }
  // a = ½ sigma sigmaᵀ
  Mat half_covariance(double t, const Vec& x) const;

 private:
  Vec x0_;
  DriftFn mu_;
  DiffusionFn sigma_;
  double horizon_;
};

// dX = sigma(t, X) dW in one dimension, sigma >= epsilon.
class Driftless1dProblem {
 public:
  Driftless1dProblem(double x0, ScalarFieldFn sigma, ScalarFieldFn dsigma_dx, double horizon,
                     double epsilon = 1e-10);

  double x0() const { return x0_; }
  double horizon() const { return horizon_; }
  double epsilon() const { return epsilon_; }
  double sigma(double t, double x) const { return sigma_(t, x); }
  double dsigma_dx(double t, double x) const { return dsigma_dx_(t, x); }
  const ScalarFieldFn& sigma_fn() const { return sigma_; }
  const ScalarFieldFn& dsigma_dx_fn() const { return dsigma_dx_; }

  // Compares the supplied derivative against a central difference on a
  // uniform (t, x) lattice; returns the largest discrepancy seen.
  double derivative_mismatch(double x_lo, double x_hi, int points, double h = 1e-5) const;

 private:
  double x0_;
  ScalarFieldFn sigma_;
  ScalarFieldFn dsigma_dx_;
  double horizon_;
  double epsilon_;
};

// dX = mu(t, X_{t1∧t}, ..., X_{tn∧t}) dt + sigma0 dW with payoff g(X_{t1}, ..., X_{tn}).
class PathProblem {
 public:
  PathProblem(Vec x0, std::vector<double> dates, PathDriftFn mu, Mat sigma0, PathPayoffFn payoff);

  int dimension() const { return static_cast<int>(x0_.size()); }
  const Vec& x0() const { return x0_; }
  const std::vector<double>& dates() const { return dates_; }
  int date_count() const { return static_cast<int>(dates_.size()); }
  double horizon() const { return dates_.back(); }
  const Mat& sigma0() const { return sigma0_; }
  const Mat& sigma0_inv_transpose() const { return sigma0_inv_t_; }

  void drift(double t, std::span<const Vec> path, Vec& out) const { mu_(t, path, out); }
  double payoff(std::span<const Vec> path) const { return g_(path); }
  const PathPayoffFn& payoff_fn() const { return g_; }

 private:
  Vec x0_;
  std::vector<double> dates_;
  PathDriftFn mu_;
  Mat sigma0_;
  Mat sigma0_inv_t_;
  PathPayoffFn g_;
};

using AnyProblem = std::variant<ConstVolProblem, GeneralProblem, Driftless1dProblem, PathProblem>;

std::string family_name(const AnyProblem& p);

// Views of one family as another, sharing the same evaluators.
GeneralProblem as_general(const ConstVolProblem& p);
GeneralProblem as_general(const Driftless1dProblem& p);
// Single monitoring date at the horizon.
PathProblem as_path(const ConstVolProblem& p, const Payoff& payoff);

}  // namespace usde
