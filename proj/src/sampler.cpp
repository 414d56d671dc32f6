#include "usde/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "usde/errors.hpp"

namespace usde {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct ChunkResult {
  RunStats head;  // samples below the prefix boundary
  RunStats tail;
};

}  // namespace

SampleRun run_samples(const SamplerOptions& options, const DrawFn& draw) {
  if (options.samples < 1) throw ConfigError("run_samples: need at least one sample");
  if (options.chunk_size < 1) throw ConfigError("run_samples: chunk size must be positive");
  const auto started = std::chrono::steady_clock::now();

  const std::uint64_t n = options.samples;
  const std::uint64_t prefix_n =
      static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * options.prefix_fraction));
  const std::uint64_t chunks = (n + options.chunk_size - 1) / options.chunk_size;

  SampleRun run;
  if (options.keep_values) run.values.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<ChunkResult> results(chunks);
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (;;) {
        if (abort.load(std::memory_order_relaxed)) return;
        const std::uint64_t c = next_chunk.fetch_add(1);
        if (c >= chunks) return;
        const std::uint64_t begin = c * options.chunk_size;
        const std::uint64_t end = std::min(n, begin + options.chunk_size);
        ChunkResult& out = results[c];
        for (std::uint64_t i = begin; i < end; ++i) {
          RngStream stream = stream_for_sample(options.seed, options.first_index + i);
          const EstimatorDraw d = draw(stream);
          RunStats& target = i < prefix_n ? out.head : out.tail;
          target.add_cost(static_cast<std::uint64_t>(d.jumps), d.gaussians, d.cost_units);
          if (!d.valid || !std::isfinite(d.value)) {
            if (options.policy == InvalidPolicy::Strict) {
              std::ostringstream os;
              os << "non-finite estimator draw at sample " << options.first_index + i << " (seed " << options.seed << ")";
              throw NumericError(os.str());
            }
            target.record_invalid();
            continue;
          }
          target.update(d.value);
          if (options.keep_values) run.values[i] = d.value;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      abort = true;
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(options.workers), chunks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : results) run.prefix.merge(r.head);
  run.stats = run.prefix;
  for (const auto& r : results) run.stats.merge(r.tail);
  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return run;
}

TailDiagnostic variance_growth(const SampleRun& run, double threshold) {
  TailDiagnostic out;
  out.prefix_count = run.prefix.count();
  out.count = run.stats.count();
  const double v_prefix = run.prefix.variance();
  const double v_full = run.stats.variance();
  if (out.prefix_count < 2 || !(v_prefix > 0.0)) {
    out.variance_ratio = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.variance_ratio = v_full / v_prefix;
  out.warning = out.variance_ratio > threshold;
  return out;
}

}  // namespace usde
