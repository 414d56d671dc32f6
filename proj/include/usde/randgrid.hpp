#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "usde/linalg.hpp"

namespace usde {

// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy
// as 1, 2, 3"). Pure function of counter and key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based stream: the key is the run seed, the upper half of the
// counter is the sample index and the lower half counts blocks. Two streams
// with the same (seed, index) produce identical draws.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  // −ln(U)/rate with U on (0, 1).
  double exponential(double rate);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int words_left_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

RngStream stream_for_sample(std::uint64_t seed, std::uint64_t sample_index);

// Distinct seed for an independent family of streams (e.g. an MLMC level).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Exponential inter-arrival gaps shorter than this fraction of the horizon
// are redrawn.
inline constexpr double kDegenerateGap = 1e-15;

// One realized Poisson grid on [0, T] with Brownian increments.
struct ArrivalGrid {
  double beta = 0.0;
  double horizon = 0.0;
  // T_0 = 0 < T_1 < ... < T_N < T_{N+1} = horizon
  std::vector<double> times;
  // dt[k] = T_{k+1} − T_k for k = 0..N
  std::vector<double> dt;
  // d x (N+1); column k is W_{T_{k+1}} − W_{T_k}
  Mat dw;
  int resampled = 0;

  int jumps() const { return static_cast<int>(times.size()) - 2; }
  int dimension() const { return static_cast<int>(dw.rows()); }
};

// Draws all arrival times first, then the increments slot by slot.
ArrivalGrid sample_arrival_grid(double beta, double horizon, int dimension, RngStream& stream);

// The part of a grid between two consecutive monitoring dates.
struct GridInterval {
  double start = 0.0;
  double end = 0.0;
  // start = T̃_0 < T̃_1 < ... < T̃_{Ñ+1} = end
  std::vector<double> times;
  // dt[j] = T̃_{j+1} − T̃_j
  std::vector<double> dt;
  // d x (Ñ+1); column j is the Brownian increment over [T̃_j, T̃_{j+1}]
  Mat dw;

  int arrivals() const { return static_cast<int>(times.size()) - 2; }
};

struct RefinedGrid {
  double beta = 0.0;
  std::vector<GridInterval> intervals;
  // Normals consumed by Brownian-bridge splits.
  int bridge_draws = 0;

  int total_arrivals() const;
};

// Cuts the grid at the monitoring dates (last date must equal the horizon).
// An increment straddling a date is split by a Brownian bridge drawn from
// `stream`, so the pieces still sum to the original increment. Throws
// NumericError if an arrival falls within the degenerate gap of a date.
RefinedGrid refine_with_dates(const ArrivalGrid& grid, std::span<const double> dates,
                              RngStream& stream);

}  // namespace usde
