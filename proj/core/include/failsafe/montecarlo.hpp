#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "failsafe/nr_distribution.hpp"

namespace failsafe {

enum class Regime { SumsOnly, NrTruncated, NrFolded };

std::string_view to_string(Regime r);

// How each rep's sum S is produced. HalfNormalSum is the experiment proper;
// NormalLimit draws S straight from its N(mu, sigma^2) limit and is only used
// to separate CLT error from errors in the closed forms.
enum class SumSource { HalfNormalSum, NormalLimit };

struct SimulationBatch {
  std::vector<double> values;
  int k = 0;
  long long reps_requested = 0;
  long long reps_kept = 0;
  Regime regime = Regime::SumsOnly;
  std::uint64_t master_seed = 0;
  std::optional<double> alpha;  // unset for SumsOnly
};

struct SimulationOptions {
  // 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
  SumSource source = SumSource::HalfNormalSum;
};

// Rep r always draws from Rng(seed, r), so batches are identical for any
// worker count.
SimulationBatch simulate_half_normal_sums(int k, long long reps, std::uint64_t seed,
                                          const SimulationOptions& opts = {});

// NrFolded keeps every rep; NrTruncated keeps reps with S >= z_alpha sqrt(k).
// Throws EmptyBatchError if truncation rejects everything.
SimulationBatch simulate_nr(int k, double alpha, long long reps, std::uint64_t seed, Regime regime,
                            const SimulationOptions& opts = {});

struct HistogramData {
  std::vector<double> bin_edges;
  std::vector<long long> counts;
  bool density_scale = true;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  double midpoint(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  // count / (total * width) when density_scale, otherwise the raw count.
  double height(std::size_t i) const;
  long long total() const;
};

// bins == nullopt selects the Freedman-Diaconis width. A batch whose values
// are all equal gets a unit-width bin centred on the value.
HistogramData histogram(const SimulationBatch& batch, std::optional<int> bins = std::nullopt,
                        bool density_scale = true);
HistogramData histogram(std::vector<double> values, std::optional<int> bins = std::nullopt,
                        bool density_scale = true);
int freedman_diaconis_bins(std::vector<double> values);

using CdfFunction = std::function<double(double)>;

// One-sample Kolmogorov-Smirnov distance
//   D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n),
// which assumes F is continuous. Against a point mass at the sample value
// this returns 1, the structural maximum.
double ks_statistic(std::vector<double> sample, const CdfFunction& cdf);
double ks_statistic(const SimulationBatch& batch, const CdfFunction& cdf);

// Asymptotic one-sample critical value c(level) / sqrt(n) with
// c(0.01) = 1.63, c(0.05) = 1.36, c(0.10) = 1.22.
double ks_critical_value(std::size_t n, double level = 0.01);

}  // namespace failsafe
