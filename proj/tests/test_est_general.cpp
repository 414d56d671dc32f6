#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "usde/catalog.hpp"
#include "usde/errors.hpp"
#include "usde/est_const.hpp"
#include "usde/est_general.hpp"
#include "usde/sampler.hpp"

using namespace usde;

TEST_CASE("first-order weight") {
  const Mat s = Mat::Constant(1, 1, 2.0);
  const Vec dw = Vec::Constant(1, 0.5);
  CHECK(weight_w1_general(Vec::Zero(1), s, dw, 0.25) == 0.0);
  CHECK(weight_w1_general(Vec::Constant(1, 0.3), s, dw, 0.25) == doctest::Approx(0.3));
  CHECK_THROWS_AS(weight_w1_general(Vec::Ones(2), Mat::Zero(2, 2), Vec::Ones(2), 0.1), NumericError);
}

TEST_CASE("second-order weight") {
  const Mat s = Mat::Constant(1, 1, 2.0);
  const Vec dw = Vec::Constant(1, 0.3);
  CHECK(weight_w2_general(Mat::Zero(1, 1), s, dw, 0.2) == 0.0);
  CHECK(weight_w2_general(Mat::Constant(1, 1, 0.1), s, dw, 0.2) == doctest::Approx(-0.06875));

  // d = 2 against the written-out contraction.
  Mat s2(2, 2), da(2, 2);
  s2 << 1.0, 0.2, -0.3, 0.8;
  da << 0.05, -0.02, -0.02, 0.07;
  Vec z(2);
  z << 0.4, -0.1;
  const double t = 0.3;
  const Mat inv = s2.inverse();
  Mat k = z * z.transpose() - t * Mat::Identity(2, 2);
  k /= t * t;
  double expect = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) expect += da(i, j) * inv(p, i) * k(p, q) * inv(q, j);
  CHECK(weight_w2_general(da, s2, z, t) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(general_weights(Vec::Zero(2), Mat::Zero(2, 2), s2.transpose().inverse(), z, t).sum() == 0.0);
}

TEST_CASE("weights are centred") {
  RngStream s(41, 0);
  const double dt = 0.2;
  const Mat sig = Mat::Constant(1, 1, 0.7);
  RunStats w1, w2;
  Vec z(1);
  for (int i = 0; i < 1'000'000; ++i) {
    z[0] = std::sqrt(dt) * s.normal();
    w1.update(weight_w1_general(Vec::Constant(1, 0.3), sig, z, dt));
    w2.update(weight_w2_general(Mat::Constant(1, 1, 0.1), sig, z, dt));
  }
  CHECK(std::abs(w1.mean()) < 3.0 * w1.stderr_mean());
  CHECK(std::abs(w2.mean()) < 3.0 * w2.stderr_mean());
}

TEST_CASE("constant diffusion reproduces the constant-diffusion draws") {
  for (const char* name : {"table1", "sine", "table3"}) {
    const auto entry = catalog_lookup(name);
    const auto& p = std::get<ConstVolProblem>(entry.problem);
    const GeneralProblem g = as_general(p);
    int mismatches = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      RngStream a = stream_for_sample(23, i), b = stream_for_sample(23, i);
      mismatches += !(draw_psi_const(p, entry.payoff, 1.5, a).value ==
                      draw_psi_general(g, entry.payoff, 1.5, b).value);
    }
    CHECK_MESSAGE(mismatches == 0, name);
  }
}

TEST_CASE("constant payoff") {
  const auto entry = catalog_lookup("gbm");
  const auto& p = std::get<GeneralProblem>(entry.problem);
  SamplerOptions opt;
  opt.seed = 4;
  opt.samples = 200'000;
  const SampleRun run =
      run_samples(opt, [&](RngStream& s) { return draw_psi_general(p, constant_payoff(0.6), 0.5, s); });
  CHECK(std::abs(run.stats.mean() - 0.6) < 3.0 * run.stats.stderr_mean());
}

TEST_CASE("geometric model: nested prefix batch medians approach the Black-Scholes price") {
  const auto entry = catalog_lookup("gbm");
  const auto& p = std::get<GeneralProblem>(entry.problem);
  const double exact = oracle::black_scholes_call(1.0, 1.0, 0.0, 0.2, 1.0);
  SamplerOptions opt;
  opt.seed = 2;
  opt.samples = 400'000;
  opt.keep_values = true;
  const SampleRun run = run_samples(opt, [&](RngStream& s) { return draw_psi_general(p, entry.payoff, 0.1, s); });
  for (std::size_t n : {100'000u, 200'000u, 400'000u}) {
    const auto bd = batch_median_dispersion(std::span<const double>(run.values).first(n), 100);
    CHECK_MESSAGE(std::abs(bd.median / exact - 1.0) < 0.05, n);
  }
}
