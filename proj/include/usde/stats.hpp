#pragma once

#include <cstdint>
#include <span>

namespace usde {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Cost counters carried alongside the statistics.
struct CostTotals {
  std::uint64_t jumps = 0;
  std::uint64_t gaussians = 0;
  std::uint64_t cost_units = 0;
};

// Mergeable count / mean / M2 accumulator (Welford update, Chan merge).
class RunStats {
 public:
  void update(double value);
  void merge(const RunStats& other);

  void record_invalid() { ++invalid_; }
  void add_cost(std::uint64_t jumps, std::uint64_t gaussians, std::uint64_t cost_units);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_.value(); }
  double m2() const { return m2_.value(); }
  double min() const { return min_; }
  double max() const { return max_; }
  std::uint64_t invalid() const { return invalid_; }
  const CostTotals& cost() const { return cost_; }

  // Unbiased sample variance; NaN for n < 2.
  double variance() const;
  // sqrt(M2 / (n (n−1))); NaN for n < 2.
  double stderr_mean() const;

 private:
  std::uint64_t n_ = 0;
  CompensatedSum mean_;
  CompensatedSum m2_;
  double min_ = 0.0;
  double max_ = 0.0;
  std::uint64_t invalid_ = 0;
  CostTotals cost_;
};

RunStats merge(RunStats a, const RunStats& b);

struct BatchDispersion {
  double median = 0.0;
  // q75 − q25 of the batch means.
  double interquartile = 0.0;
  int batches = 0;
  std::uint64_t batch_size = 0;
};

// Median and interquartile spread of the means of `batches` contiguous
// batches; a remainder that does not fill a batch is dropped. Needs
// batches >= 10 and at least one value per batch.
BatchDispersion batch_median_dispersion(std::span<const double> values, int batches);

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::span<const double> values, double q);

struct OrderStatBound {
  int m = 0;
  double p = 0.0;
  // E[(U(1) (U(2)−U(1)) ... (U(m)−U(m−1)))^−p] for uniform order statistics.
  double value = 0.0;
  // m! / (1−p)^m
  double bound = 0.0;
  bool within_bound = false;
};

// Evaluates the order-statistics expectation by nested adaptive quadrature
// and compares it with its factorial bound. Requires 1 <= m <= 4, 0 < p < 1.
OrderStatBound order_stat_bound_check(int m, double p);

}  // namespace usde
