#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "usde/catalog.hpp"
#include "usde/est_const.hpp"
#include "usde/est_path.hpp"
#include "usde/sampler.hpp"

using namespace usde;

namespace {

// Literal reading of the interval recursion: every stage re-simulates its
// interval from scratch and calls the next stage at both end points.
double literal_stage(const PathProblem& p, const RefinedGrid& grid, int k, std::vector<Vec> past,
                     const Vec& x0) {
  const GridInterval& iv = grid.intervals[k];
  const FrozenDrift mu_k = frozen_drift(p, k + 1, past);
  const int m = iv.arrivals();
  Vec x = x0, x_last, mu, mu_prev;
  double prod = 1.0;
  for (int j = 0; j <= m; ++j) {
    mu_k(iv.times[j], x, mu);
    if (j > 0) prod *= first_order_weight(mu - mu_prev, p.sigma0_inv_transpose(), iv.dw.col(j), iv.dt[j]);
    if (j == m) x_last = x;
    euler_step(x, mu, iv.dt[j], p.sigma0(), iv.dw.col(j));
    mu_prev = mu;
  }
  auto next = [&](const Vec& end) {
    std::vector<Vec> path = past;
    path.push_back(end);
    if (k + 1 == p.date_count()) return p.payoff(path);
    return literal_stage(p, grid, k + 1, path, end);
  };
  const double diff = next(x) - (m > 0 ? next(x_last) : 0.0);
  return renormalized(grid.beta, iv.end - iv.start, m, diff, prod);
}

PathProblem cosine_path_problem() {
  return PathProblem(
      Vec::Zero(1), {0.5, 1.0},
      [](double t, std::span<const Vec> path, Vec& out) {
        out.resize(1);
        out[0] = 0.3 * std::cos(path.back()[0]) + 0.2 * std::sin(path.front()[0]) + 0.1 * t;
      },
      Mat::Constant(1, 1, 0.5),
      [](std::span<const Vec> path) { return std::max(0.5 * (path[0][0] + path[1][0]) - 0.05, 0.0); });
}

}  // namespace

TEST_CASE("frozen drift") {
  const PathProblem sum(
      Vec::Zero(1), {1.0, 2.0, 3.0},
      [](double, std::span<const Vec> path, Vec& out) {
        out.setZero(1);
        for (const auto& v : path) out[0] += v[0];
      },
      Mat::Identity(1, 1), [](std::span<const Vec>) { return 0.0; });
  Vec out;
  frozen_drift(sum, 3, {Vec::Constant(1, 1.0), Vec::Constant(1, 2.0)})(0.0, Vec::Constant(1, 5.0), out);
  CHECK(out[0] == 8.0);
  frozen_drift(sum, 1, {})(0.0, Vec::Constant(1, 5.0), out);
  CHECK(out[0] == 15.0);
  CHECK_THROWS(frozen_drift(sum, 2, {}));
  CHECK_THROWS(frozen_drift(sum, 4, {{}, {}, {}}));

  const auto t4 = catalog_lookup("table4");
  const auto& p4 = std::get<PathProblem>(t4.problem);
  Vec x(4);
  x << 0.1, -0.2, 0.3, 0.05;
  frozen_drift(p4, 2, {Vec::Constant(4, 0.7)})(0.1, x, out);
  const double m = (std::exp(0.1) + std::exp(-0.2) + std::exp(0.3) + std::exp(0.05)) / 4.0;
  CHECK(out[2] == doctest::Approx(0.1 * (std::sqrt(0.75 * std::exp(0.3) + 0.25 * m) - 1.0) - 0.125));
}

TEST_CASE("single date reduces to the constant-diffusion estimator") {
  for (const char* name : {"table1", "sine", "table3"}) {
    const auto entry = catalog_lookup(name);
    const auto& p = std::get<ConstVolProblem>(entry.problem);
    const PathProblem path = as_path(p, entry.payoff);
    const double beta = 1.5;
    int mismatches = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      RngStream a = stream_for_sample(17, i), b = stream_for_sample(17, i);
      const EstimatorDraw c = draw_psi_const(p, entry.payoff, beta, a);
      const EstimatorDraw q = draw_psi_path(path, beta, b);
      mismatches += !(c.value == q.value && c.jumps == q.jumps);
    }
    CHECK_MESSAGE(mismatches == 0, name);
  }
}

TEST_CASE("literal recursion gives identical draws") {
  CatalogParams params;
  params.dates = 3;
  for (const char* name : {"table2", "table4"}) {
    const auto entry = catalog_lookup(name, params);
    const auto& p = std::get<PathProblem>(entry.problem);
    int mismatches = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      RngStream s = stream_for_sample(5, i);
      const ArrivalGrid g = sample_arrival_grid(2.0, p.horizon(), p.dimension(), s);
      const RefinedGrid r = refine_with_dates(g, p.dates(), s);
      const double fast = psi_path_on_grid(p, r).value;
      const double slow = literal_stage(p, r, 0, {}, p.x0());
      mismatches += !(fast == slow);
    }
    CHECK_MESSAGE(mismatches == 0, name);
  }
  const PathProblem cp = cosine_path_problem();
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    RngStream s = stream_for_sample(6, i);
    const RefinedGrid r = refine_with_dates(sample_arrival_grid(3.0, 1.0, 1, s), cp.dates(), s);
    mismatches += !(psi_path_on_grid(cp, r).value == literal_stage(cp, r, 0, {}, cp.x0()));
  }
  CHECK(mismatches == 0);
}

TEST_CASE("payoff evaluations per draw") {
  int calls = 0;
  const PathProblem base = cosine_path_problem();
  const PathProblem p(base.x0(), {0.25, 0.5, 0.75, 1.0},
                      [&base](double t, std::span<const Vec> path, Vec& out) { base.drift(t, path, out); },
                      base.sigma0(), [&calls](std::span<const Vec> path) {
                        ++calls;
                        return path.back()[0];
                      });
  int too_many = 0, quiet_not_once = 0;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    RngStream s = stream_for_sample(8, i);
    const RefinedGrid r = refine_with_dates(sample_arrival_grid(2.0, 1.0, 1, s), p.dates(), s);
    int busy = 0;
    for (const auto& iv : r.intervals) busy += iv.arrivals() > 0;
    calls = 0;
    psi_path_on_grid(p, r);
    too_many += calls > (1 << busy);
    if (busy == 0) quiet_not_once += calls != 1;
  }
  CHECK(too_many == 0);
  CHECK(quiet_not_once == 0);
}

TEST_CASE("constant drift Asian call matches the Gaussian closed form") {
  const double mu0 = 0.2, sig = 0.4, K = 0.1;
  const std::vector<double> dates = {0.2, 0.4, 0.6, 0.8, 1.0};
  const PathProblem p(
      Vec::Zero(1), dates, [mu0](double, std::span<const Vec>, Vec& out) { out.setConstant(1, mu0); },
      Mat::Constant(1, 1, sig), [K](std::span<const Vec> path) {
        double s = 0.0;
        for (const auto& x : path) s += x[0];
        return std::max(s / static_cast<double>(path.size()) - K, 0.0);
      });
  const double n = static_cast<double>(dates.size());
  double cov = 0.0;
  for (double a : dates)
    for (double b : dates) cov += std::min(a, b);
  const double mean = mu0 * std::accumulate(dates.begin(), dates.end(), 0.0) / n;
  const double exact = oracle::bachelier_call(mean, sig * std::sqrt(cov) / n, K);

  SamplerOptions opt;
  opt.seed = 12;
  opt.samples = 200'000;
  const SampleRun run = run_samples(opt, [&](RngStream& s) { return draw_psi_path(p, 0.2, s); });
  CHECK(std::abs(run.stats.mean() - exact) < 3.0 * run.stats.stderr_mean());
}

TEST_CASE("path-dependent drift agrees with a fine Euler scheme") {
  const PathProblem p = cosine_path_problem();
  const int steps = 400;
  const double h = 1.0 / steps;
  RunStats euler;
  for (std::uint64_t i = 0; i < 200'000; ++i) {
    RngStream s(99, i);
    std::vector<Vec> path(2, Vec::Zero(1));
    Vec x = Vec::Zero(1), mu;
    for (int j = 0; j < steps; ++j) {
      const double t = j * h;
      if (t < 0.5) path[0] = x;
      path[1] = x;
      p.drift(t, path, mu);
      x[0] += mu[0] * h + 0.5 * std::sqrt(h) * s.normal();
      if (j + 1 == steps / 2) path[0] = x;
    }
    path[1] = x;
    euler.update(p.payoff(path));
  }

  SamplerOptions opt;
  opt.seed = 13;
  opt.samples = 400'000;
  const SampleRun run = run_samples(opt, [&](RngStream& s) { return draw_psi_path(p, 0.5, s); });
  const double se = std::hypot(run.stats.stderr_mean(), euler.stderr_mean());
  CHECK(std::abs(run.stats.mean() - euler.mean()) < 3.0 * se);
}
