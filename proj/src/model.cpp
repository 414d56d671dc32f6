#include "usde/model.hpp"

#include <cmath>
#include <sstream>

#include "usde/errors.hpp"

namespace usde {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

void require_square(const Mat& m, Eigen::Index d, const char* what) {
  if (m.rows() != d || m.cols() != d) throw ConfigError(what);
}

}  // namespace

ConstVolProblem::ConstVolProblem(Vec x0, DriftFn mu, Mat sigma0, double horizon, double lipschitz_L,
                                 double mu_sup)
    : x0_(std::move(x0)),
      mu_(std::move(mu)),
      sigma0_(std::move(sigma0)),
      horizon_(horizon),
      lipschitz_(lipschitz_L),
      mu_sup_(mu_sup) {
  require(x0_.size() >= 1, "ConstVolProblem: dimension must be positive");
  require(static_cast<bool>(mu_), "ConstVolProblem: drift evaluator missing");
  require_square(sigma0_, x0_.size(), "ConstVolProblem: sigma0 must be d x d");
  require(horizon_ > 0.0 && std::isfinite(horizon_), "ConstVolProblem: horizon must be positive");
  require(lipschitz_ >= 0.0 && mu_sup_ >= 0.0, "ConstVolProblem: L and |mu|_inf must be nonnegative");
  sigma0_inv_t_ = inverse_transpose(sigma0_);
  cov_inv_ = guarded_inverse(sigma0_ * sigma0_.transpose());
}

GeneralProblem::GeneralProblem(Vec x0, DriftFn mu, DiffusionFn sigma, double horizon)
    : x0_(std::move(x0)), mu_(std::move(mu)), sigma_(std::move(sigma)), horizon_(horizon) {
  require(x0_.size() >= 1, "GeneralProblem: dimension must be positive");
  require(static_cast<bool>(mu_) && static_cast<bool>(sigma_), "GeneralProblem: evaluator missing");
  require(horizon_ > 0.0 && std::isfinite(horizon_), "GeneralProblem: horizon must be positive");
}

Mat GeneralProblem::half_covariance(double t, const Vec& x) const {
  Mat s(dimension(), dimension());
  sigma_(t, x, s);
  return 0.5 * s * s.transpose();
}

Driftless1dProblem::Driftless1dProblem(double x0, ScalarFieldFn sigma, ScalarFieldFn dsigma_dx,
                                       double horizon, double epsilon)
    : x0_(x0),
      sigma_(std::move(sigma)),
      dsigma_dx_(std::move(dsigma_dx)),
      horizon_(horizon),
      epsilon_(epsilon) {
  require(static_cast<bool>(sigma_) && static_cast<bool>(dsigma_dx_),
          "Driftless1dProblem: evaluator missing");
  require(horizon_ > 0.0 && std::isfinite(horizon_), "Driftless1dProblem: horizon must be positive");
  require(epsilon_ > 0.0, "Driftless1dProblem: epsilon must be positive");
}

double Driftless1dProblem::derivative_mismatch(double x_lo, double x_hi, int points, double h) const {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = horizon_ * i / std::max(1, points - 1);
    for (int j = 0; j < points; ++j) {
      const double x = x_lo + (x_hi - x_lo) * j / std::max(1, points - 1);
      const double fd = (sigma_(t, x + h) - sigma_(t, x - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(dsigma_dx_(t, x) - fd));
    }
  }
  return worst;
}

PathProblem::PathProblem(Vec x0, std::vector<double> dates, PathDriftFn mu, Mat sigma0,
                         PathPayoffFn payoff)
    : x0_(std::move(x0)),
      dates_(std::move(dates)),
      mu_(std::move(mu)),
      sigma0_(std::move(sigma0)),
      g_(std::move(payoff)) {
  require(x0_.size() >= 1, "PathProblem: dimension must be positive");
  require(!dates_.empty(), "PathProblem: at least one monitoring date required");
  require(dates_.front() > 0.0, "PathProblem: monitoring dates must be positive");
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    require(dates_[i] > dates_[i - 1], "PathProblem: monitoring dates must be strictly increasing");
  }
  require(static_cast<bool>(mu_) && static_cast<bool>(g_), "PathProblem: evaluator missing");
  require_square(sigma0_, x0_.size(), "PathProblem: sigma0 must be d x d");
  sigma0_inv_t_ = inverse_transpose(sigma0_);
}

std::string family_name(const AnyProblem& p) {
  struct Visitor {
    std::string operator()(const ConstVolProblem&) const { return "const_vol"; }
    std::string operator()(const GeneralProblem&) const { return "general"; }
    std::string operator()(const Driftless1dProblem&) const { return "driftless_1d"; }
    std::string operator()(const PathProblem&) const { return "path"; }
  };
  return std::visit(Visitor{}, p);
}

GeneralProblem as_general(const ConstVolProblem& p) {
  Mat sigma0 = p.sigma0();
  return GeneralProblem(
      p.x0(), p.drift_fn(), [sigma0](double, const Vec&, Mat& out) { out = sigma0; }, p.horizon());
}

GeneralProblem as_general(const Driftless1dProblem& p) {
  ScalarFieldFn sigma = p.sigma_fn();
  Vec x0(1);
  x0[0] = p.x0();
  return GeneralProblem(
      x0, [](double, const Vec&, Vec& out) { out.setZero(1); },
      [sigma](double t, const Vec& x, Mat& out) {
        out.resize(1, 1);
        out(0, 0) = sigma(t, x[0]);
      },
      p.horizon());
}

PathProblem as_path(const ConstVolProblem& p, const Payoff& payoff) {
  DriftFn mu = p.drift_fn();
  auto g = payoff.g;
  return PathProblem(
      p.x0(), {p.horizon()},
      [mu](double t, std::span<const Vec> path, Vec& out) { mu(t, path.back(), out); }, p.sigma0(),
      [g](std::span<const Vec> path) { return g(path.back()); });
}

}  // namespace usde
