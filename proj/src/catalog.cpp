#include "usde/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "usde/errors.hpp"

namespace usde {

namespace {

inline double capped_exp(double x, double cap) { return std::min(cap, std::exp(x)); }

std::vector<double> uniform_dates(int n, double horizon) {
  if (n < 1) throw ConfigError("catalog: need at least one monitoring date");
  std::vector<double> dates(n);
  for (int k = 1; k <= n; ++k) dates[k - 1] = horizon * k / n;
  dates.back() = horizon;
  return dates;
}

// 0.1(√(min(M, e^x)) − 1) − 1/8
DriftFn log_spot_drift(double cap) {
  return [cap](double, const Vec& x, Vec& out) {
    out.resize(1);
    out[0] = 0.1 * (std::sqrt(capped_exp(x[0], cap)) - 1.0) - 0.125;
  };
}

// μ_i = 0.1(√(¾ e^{x_i} + ¼ mean_j e^{x_j}) − 1) − 1/8 with capped exponentials.
void basket_drift(const Vec& x, double cap, Vec& out) {
  const Eigen::Index d = x.size();
  out.resize(d);
  double mean = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) mean += capped_exp(x[i], cap);
  mean /= static_cast<double>(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out[i] = 0.1 * (std::sqrt(0.75 * capped_exp(x[i], cap) + 0.25 * mean) - 1.0) - 0.125;
  }
}

double log_drift_sup(double cap) { return std::max(0.225, 0.1 * (std::sqrt(cap) - 1.0) - 0.125); }

}  // namespace

Payoff call_payoff(double strike) {
  return {[strike](const Vec& x) { return std::max(x[0] - strike, 0.0); }, 1.0};
}

Payoff put_payoff(double strike) {
  return {[strike](const Vec& x) { return std::max(strike - x[0], 0.0); }, 1.0};
}

Payoff exp_call_payoff(double strike, double cap_M) {
  return {[strike, cap_M](const Vec& x) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) s += capped_exp(x[i], cap_M);
            return std::max(s / static_cast<double>(x.size()) - strike, 0.0);
          },
          cap_M};
}

Payoff linear_payoff(Vec weights, double offset) {
  const double lip = weights.norm();
  return {[w = std::move(weights), offset](const Vec& x) { return w.dot(x) + offset; }, lip};
}

Payoff constant_payoff(double c) {
  return {[c](const Vec&) { return c; }, 0.0};
}

Payoff sin_payoff() {
  return {[](const Vec& x) { return std::sin(x[0]); }, 1.0};
}

Mat half_correlation_factor(int d, const std::string& factor) {
  Mat corr = Mat::Constant(d, d, 0.5);
  corr.diagonal().setOnes();
  const Eigen::LLT<Mat> llt(corr);
  Mat lower = Mat::Zero(d, d);
  lower.triangularView<Eigen::Lower>() = llt.matrixL();
  if (factor == "lower") return lower;
  if (factor == "upper") return lower.transpose();
  throw ConfigError("catalog: factor must be \"upper\" or \"lower\", got \"" + factor + "\"");
}

std::vector<std::string> catalog_names() {
  return {"table1", "table1_spot", "table2", "sine", "table3", "table4", "table5", "gbm"};
}

CatalogEntry catalog_lookup(const std::string& name, const CatalogParams& params) {
  const double T = 1.0;
  const double K = params.strike;
  const double M = params.cap_M;
  if (!(M > 0.0)) throw ConfigError("catalog: cap M must be positive");

  if (name == "table1") {
    // d/dx of 0.1 e^{x/2} is at most 0.05√M below the cap.
    ConstVolProblem p(Vec::Zero(1), log_spot_drift(M), Mat::Constant(1, 1, 0.5), T,
                      0.05 * std::sqrt(M), log_drift_sup(M));
    return {name, p,
            {[K, M](const Vec& x) { return std::max(capped_exp(x[0], M) - K, 0.0); }, M},
            0.1, "log-spot model with constant volatility 1/2, call on e^X"};
  }
  if (name == "table1_spot") {
    GeneralProblem p(
        Vec::Ones(1),
        [M](double, const Vec& s, Vec& out) {
          out.resize(1);
          out[0] = 0.1 * (std::sqrt(std::clamp(s[0], 0.0, M)) - 1.0) * s[0];
        },
        [](double, const Vec& s, Mat& out) {
          out.resize(1, 1);
          out(0, 0) = 0.5 * s[0];
        },
        T);
    return {name, p, call_payoff(K), 0.1, "table1 before the log transform (state-dependent sigma)"};
  }
  if (name == "table2") {
    PathProblem p(
        Vec::Zero(1), uniform_dates(params.dates, T),
        [M](double, std::span<const Vec> path, Vec& out) {
          out.resize(1);
          out[0] = 0.1 * (std::sqrt(capped_exp(path.back()[0], M)) - 1.0) - 0.125;
        },
        Mat::Constant(1, 1, 0.5),
        [K, M](std::span<const Vec> path) {
          double s = 0.0;
          for (const auto& x : path) s += capped_exp(x[0], M);
          return std::max(s / static_cast<double>(path.size()) - K, 0.0);
        });
    return {name, p, {}, 0.05, "table1 dynamics, Asian call over the monitoring dates"};
  }
  if (name == "sine") {
    const double mu0 = params.mu0;
    ConstVolProblem p(
        Vec::Zero(1),
        [mu0](double, const Vec& x, Vec& out) {
          out.resize(1);
          out[0] = mu0 * std::cos(x[0]);
        },
        Mat::Constant(1, 1, 0.5), T, std::abs(mu0), std::abs(mu0));
    return {name, p, sin_payoff(), 0.05, "drift mu0 cos x, volatility 1/2, payoff sin X_T"};
  }
  if (name == "table3" || name == "table4") {
    const int d = 4;
    const Mat sigma0 = half_correlation_factor(d, params.factor);
    // Each |∇μ_i|_1 is at most 0.05√M; the √d turns that into a Euclidean bound.
    const double lip = 0.05 * std::sqrt(M) * std::sqrt(static_cast<double>(d));
    if (name == "table3") {
      ConstVolProblem p(Vec::Zero(d), [M](double, const Vec& x, Vec& out) { basket_drift(x, M, out); },
                        sigma0, T, lip, log_drift_sup(M));
      return {name, p, exp_call_payoff(K, M), 0.5, "4-d basket, correlation 1/2, basket call"};
    }
    PathProblem p(
        Vec::Zero(d), uniform_dates(params.dates, T),
        [M](double, std::span<const Vec> path, Vec& out) { basket_drift(path.back(), M, out); },
        sigma0, [K, M](std::span<const Vec> path) {
          double s = 0.0;
          std::size_t terms = 0;
          for (const auto& x : path) {
            for (Eigen::Index i = 0; i < x.size(); ++i, ++terms) s += capped_exp(x[i], M);
          }
          return std::max(s / static_cast<double>(terms) - K, 0.0);
        });
    return {name, p, {}, 0.05, "4-d basket, Asian basket call over the monitoring dates"};
  }
  if (name == "table5") {
    const double sb = params.sigma_bar;
    if (!(sb > 0.0)) throw ConfigError("catalog: sigma_bar must be positive");
    Driftless1dProblem p(
        1.0, [sb](double, double x) { return 2.0 * sb / (1.0 + x * x); },
        [sb](double, double x) {
          const double q = 1.0 + x * x;
          return -4.0 * sb * x / (q * q);
        },
        T);
    return {name, p, call_payoff(K), 0.1, "driftless, sigma = 2 sigma_bar / (1 + x^2), call"};
  }
  if (name == "gbm") {
    const double s = params.gbm_sigma;
    GeneralProblem p(
        Vec::Ones(1), [](double, const Vec&, Vec& out) { out.setZero(1); },
        [s](double, const Vec& x, Mat& out) {
          out.resize(1, 1);
          out(0, 0) = s * x[0];
        },
        T);
    return {name, p, call_payoff(K), 0.1, "driftless geometric Brownian motion, call"};
  }

  std::ostringstream os;
  os << "unknown model \"" << name << "\"; available:";
  for (const auto& n : catalog_names()) os << ' ' << n;
  throw LookupError(os.str());
}

}  // namespace usde
