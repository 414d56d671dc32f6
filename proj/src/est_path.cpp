#include "usde/est_path.hpp"

#include <cmath>

#include "usde/errors.hpp"

namespace usde {

FrozenDrift::FrozenDrift(const PathProblem& problem, int k, std::vector<Vec> past)
    : problem_(&problem), k_(k), past_(std::move(past)) {
  if (k_ < 1 || k_ > problem.date_count()) throw ConfigError("frozen_drift: k out of range");
  if (static_cast<int>(past_.size()) != k_ - 1) {
    throw ConfigError("frozen_drift: need exactly k-1 past values");
  }
}

void FrozenDrift::operator()(double t, const Vec& x, Vec& out) const {
  std::vector<Vec> path(past_);
  path.resize(problem_->date_count(), x);
  problem_->drift(t, path, out);
}

FrozenDrift frozen_drift(const PathProblem& problem, int k, std::vector<Vec> past) {
  return FrozenDrift(problem, k, std::move(past));
}

namespace {

class PathRecursion {
 public:
  PathRecursion(const PathProblem& problem, const RefinedGrid& grid)
      : p_(problem), grid_(grid), n_(problem.date_count()), path_(n_, problem.x0()) {}

  // ψ̃ for stage k (0-based) started at x, with path_[0..k−1] fixed.
  double stage(int k, const Vec& x_start) {
    const GridInterval& iv = grid_.intervals[k];
    const int arrivals = iv.arrivals();
    const int d = p_.dimension();
    const Mat& sigma0 = p_.sigma0();
    const Mat& inv_t = p_.sigma0_inv_transpose();

    Vec x = x_start;
    Vec x_last;
    Vec mu(d), mu_prev(d);
    double prod = 1.0;
    for (int j = 0; j <= arrivals; ++j) {
      for (int s = k; s < n_; ++s) path_[s] = x;
      p_.drift(iv.times[j], path_, mu);
      ++cost_;
      if (j > 0) {
        prod *= first_order_weight(mu - mu_prev, inv_t, iv.dw.col(j), iv.dt[j]);
        ++cost_;
      }
      if (j == arrivals) x_last = x;
      euler_step(x, mu, iv.dt[j], sigma0, iv.dw.col(j));
      mu_prev.swap(mu);
    }

    const double span = iv.end - iv.start;
    double f_end = 0.0;
    double f_last = 0.0;
    if (k + 1 == n_) {
      path_[k] = x;
      f_end = p_.payoff(path_);
      ++cost_;
      if (arrivals > 0) {
        path_[k] = x_last;
        f_last = p_.payoff(path_);
        ++cost_;
      }
    } else {
      if (arrivals > 0 && prod == 0.0) return 0.0;
      path_[k] = x;
      f_end = stage(k + 1, x);
      if (arrivals > 0) {
        path_[k] = x_last;
        f_last = stage(k + 1, x_last);
      }
    }
    return renormalized(grid_.beta, span, arrivals, f_end - f_last, prod);
  }

  std::uint64_t cost() const { return cost_; }

 private:
  const PathProblem& p_;
  const RefinedGrid& grid_;
  int n_;
  std::vector<Vec> path_;
  std::uint64_t cost_ = 0;
};

}  // namespace

EstimatorDraw psi_path_on_grid(const PathProblem& problem, const RefinedGrid& grid) {
  if (static_cast<int>(grid.intervals.size()) != problem.date_count()) {
    throw ConfigError("psi_path_on_grid: grid intervals do not match the monitoring dates");
  }
  PathRecursion rec(problem, grid);
  EstimatorDraw draw;
  draw.value = rec.stage(0, problem.x0());
  draw.jumps = grid.total_arrivals();
  draw.cost_units = rec.cost();
  draw.valid = std::isfinite(draw.value);
  return draw;
}

EstimatorDraw draw_psi_path(const PathProblem& problem, double beta, RngStream& stream) {
  const int d = problem.dimension();
  const ArrivalGrid grid = sample_arrival_grid(beta, problem.horizon(), d, stream);
  const RefinedGrid refined = refine_with_dates(grid, problem.dates(), stream);
  EstimatorDraw draw = psi_path_on_grid(problem, refined);
  draw.gaussians = static_cast<std::uint64_t>(d) * (grid.jumps() + 1) + refined.bridge_draws;
  return draw;
}

}  // namespace usde
