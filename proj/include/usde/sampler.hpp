#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "usde/estimator.hpp"
#include "usde/randgrid.hpp"
#include "usde/stats.hpp"

namespace usde {

using DrawFn = std::function<EstimatorDraw(RngStream&)>;

struct SamplerOptions {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  // Sample i of the run uses stream index first_index + i.
  std::uint64_t first_index = 0;
  // 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  InvalidPolicy policy = InvalidPolicy::Strict;
  bool keep_values = false;
  // The prefix statistics cover the first floor(samples * prefix_fraction) draws.
  double prefix_fraction = 0.1;
  std::uint64_t chunk_size = 4096;
};

struct SampleRun {
  RunStats stats;
  RunStats prefix;
  // One entry per sample when keep_values is set; NaN marks a skipped draw.
  std::vector<double> values;
  double wall_seconds = 0.0;
};

// Draws samples 0..n−1, sample i from stream_for_sample(seed, first_index + i). Samples are
// accumulated in fixed-size chunks and chunks are merged in index order, so
// the result is bit-identical for any worker count.
SampleRun run_samples(const SamplerOptions& options, const DrawFn& draw);

struct TailDiagnostic {
  std::uint64_t prefix_count = 0;
  std::uint64_t count = 0;
  // Var(full run) / Var(prefix).
  double variance_ratio = 0.0;
  bool warning = false;
};

// Flags a sample variance that keeps growing with the sample size, the
// signature of an estimator with a mean but no finite variance.
TailDiagnostic variance_growth(const SampleRun& run, double threshold = 1.2);

unsigned resolve_workers(unsigned requested);

}  // namespace usde
