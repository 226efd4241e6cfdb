#include "failsafe/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "failsafe/error.hpp"
#include "failsafe/normal.hpp"
#include "failsafe/rng.hpp"

namespace failsafe {
namespace {

unsigned resolve_workers(unsigned requested, long long work) {
  unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::clamp<long long>(w, 1, std::max<long long>(1, work)));
}

// Calls body(begin, end) over contiguous slices of [0, n).
template <typename Body>
void parallel_ranges(long long n, unsigned workers, Body&& body) {
  workers = resolve_workers(workers, n);
  if (workers == 1) {
    body(0LL, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const long long chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const long long begin = w * chunk;
    const long long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

// One value of S per rep, rep r drawn from Rng(seed, r).
std::vector<double> draw_sums(int k, long long reps, std::uint64_t seed, const SimulationOptions& opts) {
  std::vector<double> sums(static_cast<std::size_t>(reps));
  const double mu = k * normal::kSqrt2OverPi;
  const double sigma = std::sqrt(k * normal::kHalfNormalVarFactor);
  parallel_ranges(reps, opts.workers, [&](long long begin, long long end) {
    for (long long r = begin; r < end; ++r) {
      Rng rng(seed, static_cast<std::uint64_t>(r));
      double s = 0.0;
      if (opts.source == SumSource::HalfNormalSum) {
        for (int i = 0; i < k; ++i) s += std::abs(rng.normal());
      } else {
        s = mu + sigma * rng.normal();
      }
      sums[static_cast<std::size_t>(r)] = s;
    }
  });
  return sums;
}

void check_sim_args(int k, long long reps) {
  if (k < 1) throw DomainError("simulation: k must be >= 1");
  if (reps < 1) throw DomainError("simulation: reps must be >= 1");
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SumsOnly: return "sums";
    case Regime::NrTruncated: return "truncated";
    case Regime::NrFolded: return "folded";
  }
  return "unknown";
}

SimulationBatch simulate_half_normal_sums(int k, long long reps, std::uint64_t seed, const SimulationOptions& opts) {
  check_sim_args(k, reps);
  SimulationBatch b;
  b.values = draw_sums(k, reps, seed, opts);
  b.k = k;
  b.reps_requested = reps;
  b.reps_kept = reps;
  b.regime = Regime::SumsOnly;
  b.master_seed = seed;
  return b;
}

SimulationBatch simulate_nr(int k, double alpha, long long reps, std::uint64_t seed, Regime regime,
                            const SimulationOptions& opts) {
  check_sim_args(k, reps);
  if (regime == Regime::SumsOnly) throw DomainError("simulate_nr: regime must be truncated or folded");
  const auto p = sum_params(k, alpha);
  const double z2 = p.z_alpha * p.z_alpha;
  const double cut = p.truncation_point();

  auto sums = draw_sums(k, reps, seed, opts);
  SimulationBatch b;
  b.k = k;
  b.reps_requested = reps;
  b.regime = regime;
  b.master_seed = seed;
  b.alpha = alpha;
  b.values.reserve(sums.size());
  for (double s : sums) {
    if (regime == Regime::NrTruncated && s < cut) continue;
    // Never below -k: S^2 >= 0.
    b.values.push_back(std::max(s * s / z2 - k, -static_cast<double>(k)));
  }
  b.reps_kept = static_cast<long long>(b.values.size());
  if (b.values.empty()) throw EmptyBatchError("simulate_nr: truncation rejected every draw");
  return b;
}

double HistogramData::height(std::size_t i) const {
  if (!density_scale) return static_cast<double>(counts[i]);
  return static_cast<double>(counts[i]) / (static_cast<double>(total()) * width(i));
}

long long HistogramData::total() const {
  long long t = 0;
  for (auto c : counts) t += c;
  return t;
}

int freedman_diaconis_bins(std::vector<double> values) {
  if (values.empty()) throw DomainError("freedman_diaconis_bins: empty sample");
  std::sort(values.begin(), values.end());
  const double range = values.back() - values.front();
  if (range <= 0.0) return 1;
  const double n = static_cast<double>(values.size());
  const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
  int bins;
  if (iqr > 0.0) {
    bins = static_cast<int>(std::ceil(range / (2.0 * iqr / std::cbrt(n))));
  } else {
    bins = static_cast<int>(std::ceil(std::log2(n))) + 1;  // Sturges
  }
  return std::clamp(bins, 1, 10000);
}

HistogramData histogram(std::vector<double> values, std::optional<int> bins, bool density_scale) {
  if (values.empty()) throw DomainError("histogram: empty batch");
  if (bins && *bins < 1) throw DomainError("histogram: bins must be >= 1");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn;
  double hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const int nb = bins ? *bins : freedman_diaconis_bins(values);

  HistogramData h;
  h.density_scale = density_scale;
  h.bin_edges.resize(static_cast<std::size_t>(nb) + 1);
  const double w = (hi - lo) / nb;
  for (int i = 0; i < nb; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + i * w;
  h.bin_edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(nb), 0);
  for (double x : values) {
    auto idx = static_cast<long long>(std::floor((x - lo) / w));
    idx = std::clamp<long long>(idx, 0, nb - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

HistogramData histogram(const SimulationBatch& batch, std::optional<int> bins, bool density_scale) {
  return histogram(batch.values, bins, density_scale);
}

double ks_statistic(std::vector<double> sample, const CdfFunction& cdf) {
  if (sample.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return std::min(d, 1.0);
}

double ks_statistic(const SimulationBatch& batch, const CdfFunction& cdf) { return ks_statistic(batch.values, cdf); }

double ks_critical_value(std::size_t n, double level) {
  if (n == 0) throw DomainError("ks_critical_value: n must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("ks_critical_value: level must lie in (0, 1)");
  double c;
  if (level == 0.01) c = 1.63;
  else if (level == 0.05) c = 1.36;
  else if (level == 0.10) c = 1.22;
  else c = std::sqrt(-0.5 * std::log(0.5 * level));
  return c / std::sqrt(static_cast<double>(n));
}

}  // namespace failsafe
