#include "usde/randgrid.hpp"

#include <cmath>

#include "usde/errors.hpp"

namespace usde {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {}

void RngStream::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32_10(ctr, key);
  ++block_;
  words_left_ = 2;
}

RngStream::result_type RngStream::operator()() {
  if (words_left_ == 0) refill();
  const int base = 2 * (2 - words_left_);
  --words_left_;
  return (static_cast<std::uint64_t>(buffer_[base + 1]) << 32) | buffer_[base];
}

double RngStream::uniform_open() {
  // 53 random bits centred in their cell: never 0, never 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(*this); }

double RngStream::exponential(double rate) { return -std::log(uniform_open()) / rate; }

RngStream stream_for_sample(std::uint64_t seed, std::uint64_t sample_index) {
  return RngStream(seed, sample_index);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt + 0x632BE59BD9B4E019ull));
}

ArrivalGrid sample_arrival_grid(double beta, double horizon, int dimension, RngStream& stream) {
  if (!(beta > 0.0) || !(horizon > 0.0) || dimension < 1) {
    throw ConfigError("sample_arrival_grid: need beta > 0, horizon > 0, dimension >= 1");
  }
  ArrivalGrid grid;
  grid.beta = beta;
  grid.horizon = horizon;
  grid.times.push_back(0.0);
  const double min_gap = kDegenerateGap * horizon;
  double t = 0.0;
  for (;;) {
    double tau = stream.exponential(beta);
    double next = t + tau;
    // A gap this short, before or at the horizon, would blow up a weight.
    while (tau < min_gap || (next < horizon && horizon - next < min_gap)) {
      ++grid.resampled;
      tau = stream.exponential(beta);
      next = t + tau;
    }
    if (next >= horizon) break;
    grid.times.push_back(next);
    t = next;
  }
  grid.times.push_back(horizon);

  const int slots = static_cast<int>(grid.times.size()) - 1;
  grid.dt.resize(slots);
  grid.dw.resize(dimension, slots);
  for (int k = 0; k < slots; ++k) {
    grid.dt[k] = grid.times[k + 1] - grid.times[k];
    const double scale = std::sqrt(grid.dt[k]);
    for (int i = 0; i < dimension; ++i) grid.dw(i, k) = scale * stream.normal();
  }
  return grid;
}

int RefinedGrid::total_arrivals() const {
  int n = 0;
  for (const auto& iv : intervals) n += iv.arrivals();
  return n;
}

RefinedGrid refine_with_dates(const ArrivalGrid& grid, std::span<const double> dates,
                              RngStream& stream) {
  if (dates.empty()) throw ConfigError("refine_with_dates: no monitoring dates");
  for (std::size_t j = 0; j < dates.size(); ++j) {
    if (!(dates[j] > (j == 0 ? 0.0 : dates[j - 1]))) {
      throw ConfigError("refine_with_dates: dates must be positive and strictly increasing");
    }
  }
  if (std::abs(dates.back() - grid.horizon) > 1e-12 * grid.horizon) {
    throw ConfigError("refine_with_dates: last date must equal the grid horizon");
  }

  const int d = grid.dimension();
  const double min_gap = kDegenerateGap * grid.horizon;
  RefinedGrid out;
  out.beta = grid.beta;
  out.intervals.resize(dates.size());

  // Pieces are gathered per interval, then packed into the Mat layout.
  std::vector<std::vector<Vec>> pieces(dates.size());
  std::size_t j = 0;
  out.intervals[0].start = 0.0;
  out.intervals[0].times.push_back(0.0);

  auto close_interval = [&](double end) {
    auto& iv = out.intervals[j];
    iv.end = end;
    iv.times.push_back(end);
    ++j;
    if (j < dates.size()) {
      out.intervals[j].start = end;
      out.intervals[j].times.push_back(end);
    }
  };

  const int slots = static_cast<int>(grid.dt.size());
  for (int k = 0; k < slots; ++k) {
    double s = grid.times[k];
    const double b = grid.times[k + 1];
    Vec rest = grid.dw.col(k);
    while (j + 1 < dates.size() && dates[j] < b) {
      const double cut = dates[j];
      if (cut - s < min_gap || b - cut < min_gap) {
        throw NumericError("refine_with_dates: arrival coincides with a monitoring date");
      }
      const double len = b - s;
      const double a = cut - s;
      const double bridge_sd = std::sqrt(a * (len - a) / len);
      Vec first(d);
      for (int i = 0; i < d; ++i) first[i] = (a / len) * rest[i] + bridge_sd * stream.normal();
      out.bridge_draws += d;
      pieces[j].push_back(first);
      rest -= first;
      close_interval(cut);
      s = cut;
    }
    pieces[j].push_back(rest);
    if (k + 1 < slots) {
      out.intervals[j].times.push_back(b);
    } else {
      close_interval(dates.back());
    }
  }

  for (std::size_t m = 0; m < out.intervals.size(); ++m) {
    auto& iv = out.intervals[m];
    const int n_pieces = static_cast<int>(pieces[m].size());
    iv.dt.resize(n_pieces);
    iv.dw.resize(d, n_pieces);
    for (int p = 0; p < n_pieces; ++p) {
      iv.dt[p] = iv.times[p + 1] - iv.times[p];
      iv.dw.col(p) = pieces[m][p];
    }
  }
  return out;
}

}  // namespace usde
