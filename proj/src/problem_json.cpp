#include "usde/problem_json.hpp"

#include <algorithm>
#include <cmath>

#include "usde/errors.hpp"

namespace usde {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("problem json: missing field \"") + key + "\"");
  }
  return obj.at(key);
}

double number(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) throw ConfigError(std::string("problem json: \"") + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, key) : fallback;
}

Vec vector_of(const json& v, const char* what) {
  if (v.is_number()) return Vec::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("problem json: \"") + what + "\" must be a non-empty array");
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string("problem json: \"") + what + "\" has a non-number entry");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Mat matrix_of(const json& v, Eigen::Index d, const char* what) {
  if (v.is_number() && d == 1) return Mat::Constant(1, 1, v.get<double>());
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != d) {
    throw ConfigError(std::string("problem json: \"") + what + "\" must be a d x d array");
  }
  Mat out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Vec row = vector_of(v[i], what);
    if (row.size() != d) throw ConfigError(std::string("problem json: \"") + what + "\" must be a d x d array");
    out.row(i) = row.transpose();
  }
  return out;
}

void check_size(const Vec& v, Eigen::Index d, const char* what) {
  if (v.size() != d) throw ConfigError(std::string("problem json: \"") + what + "\" has the wrong length");
}

// {"type": "affine", "b": [...], "A": [[...]]}: μ = b + A x
// {"type": "tabulated", "x": [...], "values": [...]}: 1-d, piecewise linear in x, flat outside
DriftFn drift_of(const json& spec, Eigen::Index d) {
  const std::string type = field(spec, "type").get<std::string>();
  if (type == "affine") {
    Vec b = spec.contains("b") ? vector_of(spec.at("b"), "b") : Vec::Zero(d);
    Mat A = spec.contains("A") ? matrix_of(spec.at("A"), d, "A") : Mat::Zero(d, d);
    check_size(b, d, "b");
    return [b, A](double, const Vec& x, Vec& out) { out = b + A * x; };
  }
  if (type == "tabulated") {
    if (d != 1) throw ConfigError("problem json: tabulated drifts are one-dimensional");
    const Vec xs = vector_of(field(spec, "x"), "x");
    const Vec ys = vector_of(field(spec, "values"), "values");
    if (xs.size() != ys.size() || xs.size() < 2) {
      throw ConfigError("problem json: tabulated drift needs matching x/values with at least two points");
    }
    for (Eigen::Index i = 1; i < xs.size(); ++i) {
      if (!(xs[i] > xs[i - 1])) throw ConfigError("problem json: tabulated x must be increasing");
    }
    return [xs, ys](double, const Vec& x, Vec& out) {
      out.resize(1);
      const double v = x[0];
      const Eigen::Index n = xs.size();
      if (v <= xs[0]) {
        out[0] = ys[0];
      } else if (v >= xs[n - 1]) {
        out[0] = ys[n - 1];
      } else {
        const auto it = std::upper_bound(xs.data(), xs.data() + n, v);
        const Eigen::Index j = it - xs.data();
        const double w = (v - xs[j - 1]) / (xs[j] - xs[j - 1]);
        out[0] = (1.0 - w) * ys[j - 1] + w * ys[j];
      }
    };
  }
  throw ConfigError("problem json: unknown drift type \"" + type + "\"");
}

Payoff payoff_of(const json& spec, Eigen::Index d) {
  const std::string kind = field(spec, "kind").get<std::string>();
  if (kind == "call") return call_payoff(number(spec, "strike"));
  if (kind == "put") return put_payoff(number(spec, "strike"));
  if (kind == "exp_call") return exp_call_payoff(number(spec, "strike"), number_or(spec, "cap_M", 1e6));
  if (kind == "constant") return constant_payoff(number(spec, "value"));
  if (kind == "sin") return sin_payoff();
  if (kind == "linear") {
    Vec w = vector_of(field(spec, "weights"), "weights");
    check_size(w, d, "weights");
    return linear_payoff(std::move(w), number_or(spec, "offset", 0.0));
  }
  throw ConfigError("problem json: unknown payoff kind \"" + kind + "\"");
}

// Path payoffs: "asian_call" (mean over dates of x_0 − K)+ and
// "asian_exp_call" (mean over dates and coordinates of min(M, e^x) − K)+.
PathPayoffFn path_payoff_of(const json& spec) {
  const std::string kind = field(spec, "kind").get<std::string>();
  const double K = number(spec, "strike");
  if (kind == "asian_call") {
    return [K](std::span<const Vec> path) {
      double s = 0.0;
      for (const auto& x : path) s += x[0];
      return std::max(s / static_cast<double>(path.size()) - K, 0.0);
    };
  }
  if (kind == "asian_exp_call") {
    const double M = number_or(spec, "cap_M", 1e6);
    return [K, M](std::span<const Vec> path) {
      double s = 0.0;
      std::size_t terms = 0;
      for (const auto& x : path) {
        for (Eigen::Index i = 0; i < x.size(); ++i, ++terms) s += std::min(M, std::exp(x[i]));
      }
      return std::max(s / static_cast<double>(terms) - K, 0.0);
    };
  }
  throw ConfigError("problem json: unknown path payoff kind \"" + kind + "\"");
}

}  // namespace

CatalogParams catalog_params_from_json(const json& params) {
  CatalogParams p;
  if (params.is_null()) return p;
  if (!params.is_object()) throw ConfigError("problem json: \"params\" must be an object");
  p.cap_M = number_or(params, "cap_M", p.cap_M);
  p.strike = number_or(params, "strike", p.strike);
  p.mu0 = number_or(params, "mu0", p.mu0);
  p.sigma_bar = number_or(params, "sigma_bar", p.sigma_bar);
  p.gbm_sigma = number_or(params, "gbm_sigma", p.gbm_sigma);
  if (params.contains("dates")) p.dates = field(params, "dates").get<int>();
  if (params.contains("factor")) p.factor = field(params, "factor").get<std::string>();
  return p;
}

CatalogEntry problem_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("problem json: document must be an object");
    if (doc.contains("model")) {
      return catalog_lookup(doc.at("model").get<std::string>(),
                            catalog_params_from_json(doc.value("params", json())));
    }
    const std::string family = field(doc, "family").get<std::string>();
    const double T = number(doc, "horizon");
    const double beta = number_or(doc, "beta", 0.1);

    if (family == "driftless_1d") {
      const double x0 = number(doc, "x0");
      const json& s = field(doc, "sigma");
      const std::string type = field(s, "type").get<std::string>();
      ScalarFieldFn sigma, dsigma;
      if (type == "linear") {
        // σ = a + b x
        const double a = number(s, "a");
        const double b = number(s, "b");
        sigma = [a, b](double, double x) { return a + b * x; };
        dsigma = [b](double, double) { return b; };
      } else if (type == "bump") {
        // σ = 2σ̄ / (1 + x²)
        const double sb = number(s, "sigma_bar");
        sigma = [sb](double, double x) { return 2.0 * sb / (1.0 + x * x); };
        dsigma = [sb](double, double x) {
          const double q = 1.0 + x * x;
          return -4.0 * sb * x / (q * q);
        };
      } else {
        throw ConfigError("problem json: unknown sigma type \"" + type + "\"");
      }
      Driftless1dProblem p(x0, sigma, dsigma, T, number_or(doc, "epsilon", 1e-10));
      return {"custom", p, payoff_of(field(doc, "payoff"), 1), beta, "driftless problem from json"};
    }

    const Vec x0 = vector_of(field(doc, "x0"), "x0");
    const Eigen::Index d = x0.size();
    DriftFn mu = drift_of(field(doc, "drift"), d);

    if (family == "const_vol") {
      ConstVolProblem p(x0, mu, matrix_of(field(doc, "sigma"), d, "sigma"), T,
                        number_or(doc, "lipschitz", 0.0), number_or(doc, "mu_sup", 0.0));
      return {"custom", p, payoff_of(field(doc, "payoff"), d), beta, "constant-volatility problem from json"};
    }
    if (family == "general") {
      const json& s = field(doc, "sigma");
      DiffusionFn sigma;
      const std::string type = s.is_object() ? field(s, "type").get<std::string>() : "constant";
      if (type == "constant") {
        const Mat m = matrix_of(s.is_object() ? field(s, "matrix") : s, d, "sigma");
        sigma = [m](double, const Vec&, Mat& out) { out = m; };
      } else if (type == "linear_diag") {
        // σ = diag(offset_i + scale_i x_i)
        const Vec off = vector_of(field(s, "offset"), "offset");
        const Vec scale = vector_of(field(s, "scale"), "scale");
        check_size(off, d, "offset");
        check_size(scale, d, "scale");
        sigma = [off, scale](double, const Vec& x, Mat& out) {
          out = (off + scale.cwiseProduct(x)).asDiagonal();
        };
      } else {
        throw ConfigError("problem json: unknown sigma type \"" + type + "\"");
      }
      GeneralProblem p(x0, mu, sigma, T);
      return {"custom", p, payoff_of(field(doc, "payoff"), d), beta, "general problem from json"};
    }
    if (family == "path") {
      const Vec dates = vector_of(field(doc, "dates"), "dates");
      std::vector<double> dv(dates.data(), dates.data() + dates.size());
      if (std::abs(dv.back() - T) > 1e-12 * T) throw ConfigError("problem json: last date must equal the horizon");
      dv.back() = T;
      // The drift reads the current state only.
      PathDriftFn path_mu = [mu](double t, std::span<const Vec> path, Vec& out) { mu(t, path.back(), out); };
      PathProblem p(x0, dv, path_mu, matrix_of(field(doc, "sigma"), d, "sigma"),
                    path_payoff_of(field(doc, "payoff")));
      return {"custom", p, {}, beta, "path problem from json"};
    }
    throw ConfigError("problem json: unknown family \"" + family + "\"");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("problem json: ") + e.what());
  }
}

}  // namespace usde
