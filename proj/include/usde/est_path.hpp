#pragma once

#include <vector>

#include "usde/estimator.hpp"
#include "usde/model.hpp"
#include "usde/randgrid.hpp"

namespace usde {

// μ_k(t, x) = μ(t, x_1, ..., x_{k−1}, x, ..., x) on [t_{k−1}, t_k].
class FrozenDrift {
 public:
  FrozenDrift(const PathProblem& problem, int k, std::vector<Vec> past);

  int interval() const { return k_; }
  const std::vector<Vec>& past() const { return past_; }
  void operator()(double t, const Vec& x, Vec& out) const;

 private:
  const PathProblem* problem_;
  int k_;
  std::vector<Vec> past_;
};

// Requires 1 <= k <= n and past.size() == k − 1.
FrozenDrift frozen_drift(const PathProblem& problem, int k, std::vector<Vec> past);

// One draw of the path-dependent estimator: a global arrival grid cut at the
// monitoring dates, then the interval recursion from the first date onward.
// Each interval with arrivals evaluates the next stage at two start points,
// so a draw evaluates 2^m payoffs for m intervals with a nonzero weight
// product (E[2^m] <= e^{βT}).
EstimatorDraw draw_psi_path(const PathProblem& problem, double beta, RngStream& stream);

EstimatorDraw psi_path_on_grid(const PathProblem& problem, const RefinedGrid& grid);

}  // namespace usde
