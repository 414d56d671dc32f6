#include "usde/lamperti.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>

#include "usde/errors.hpp"

namespace usde {

namespace {

template <class F>
double integrate(F&& f, double a, double b, double tol, double t) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, tol, t);
  auto accepted = [](double value, double err, double l1) {
    return std::isfinite(value) && err <= 1e-8 * std::max(1.0, l1);
  };
  double err = 0.0;
  double l1 = 0.0;
  // Gauss-Kronrod for smooth integrands, tanh-sinh when an endpoint is nearly singular.
  double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err, &l1);
  if (accepted(value, err, l1)) return value;
  thread_local boost::math::quadrature::tanh_sinh<double> quad;
  value = quad.integrate(f, a, b, tol, &err, &l1);
  if (!accepted(value, err, l1)) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "] at t=" << t
       << " (error estimate " << err << ")";
    throw NumericError(os.str());
  }
  return value;
}

}  // namespace

LampertiTransform::LampertiTransform(ScalarFieldFn sigma, ScalarFieldFn dsigma_dx,
                                     ScalarFieldFn dsigma_dt, ScalarFieldFn mu,
                                     LampertiOptions options)
    : sigma_(std::move(sigma)),
      dsigma_dx_(std::move(dsigma_dx)),
      dsigma_dt_(std::move(dsigma_dt)),
      mu_(std::move(mu)),
      options_(options) {
  if (!sigma_ || !dsigma_dx_ || !mu_) throw ConfigError("lamperti_1d: evaluator missing");
  if (!(options_.bracket_lo < options_.bracket_hi)) throw ConfigError("lamperti_1d: empty bracket");
}

double LampertiTransform::integral_inverse_sigma(double t, double a, double b) const {
  auto integrand = [&](double y) {
    const double s = sigma_(t, y);
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "lamperti_1d: non-positive sigma " << s << " at t=" << t << ", x=" << y;
      throw DomainError(os.str());
    }
    return 1.0 / s;
  };
  return integrate(integrand, a, b, options_.quadrature_tolerance, t);
}

double LampertiTransform::h(double t, double x) const {
  return integral_inverse_sigma(t, options_.reference, x);
}

double LampertiTransform::dh_dt(double t, double x) const {
  if (!dsigma_dt_) return 0.0;
  auto integrand = [&](double y) {
    const double s = sigma_(t, y);
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "lamperti_1d: non-positive sigma " << s << " at t=" << t << ", x=" << y;
      throw DomainError(os.str());
    }
    return -dsigma_dt_(t, y) / (s * s);
  };
  return integrate(integrand, options_.reference, x, options_.quadrature_tolerance, t);
}

double LampertiTransform::h_inverse(double t, double y) const {
  double lo = options_.bracket_lo;
  double hi = options_.bracket_hi;
  double h_lo = h(t, lo);
  const double h_hi = h_lo + integral_inverse_sigma(t, lo, hi);
  if (y < h_lo || y > h_hi) {
    std::ostringstream os;
    os << "lamperti_1d: y=" << y << " outside h(bracket) = [" << h_lo << ", " << h_hi << "]";
    throw DomainError(os.str());
  }
  // h is increasing; the running value h_lo is extended one sub-integral at a time.
  while (hi - lo > options_.inverse_tolerance) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double h_mid = h_lo + integral_inverse_sigma(t, lo, mid);
    if (h_mid < y) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

double LampertiTransform::drift(double t, double y) const {
  const double x = h_inverse(t, y);
  return dh_dt(t, x) + mu_(t, x) / sigma_(t, x) - 0.5 * dsigma_dx_(t, x);
}

DriftFn LampertiTransform::drift_fn() const {
  return [self = *this](double t, const Vec& y, Vec& out) {
    out.resize(1);
    out[0] = self.drift(t, y[0]);
  };
}

ConstVolProblem LampertiTransform::to_problem(double x0, double horizon, double lipschitz_L,
                                              double mu_sup) const {
  Vec y0(1);
  y0[0] = h(0.0, x0);
  return ConstVolProblem(y0, drift_fn(), Mat::Identity(1, 1), horizon, lipschitz_L, mu_sup);
}

LampertiTransform lamperti_1d(ScalarFieldFn sigma, ScalarFieldFn dsigma_dx, ScalarFieldFn dsigma_dt,
                              ScalarFieldFn mu, LampertiOptions options) {
  return LampertiTransform(std::move(sigma), std::move(dsigma_dx), std::move(dsigma_dt),
                           std::move(mu), options);
}

}  // namespace usde
