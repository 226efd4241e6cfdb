#include "failsafe/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "failsafe/error.hpp"
#include "failsafe/montecarlo.hpp"
#include "failsafe/rng.hpp"

namespace failsafe {

std::vector<int> k_grid(int k_min, int k_max, int step) {
  if (k_min < 1 || step < 1 || k_max < k_min) throw DomainError("k grid: need 1 <= k_min <= k_max and step >= 1");
  std::vector<int> grid;
  for (int k = k_min; k <= k_max; k += step) grid.push_back(k);
  return grid;
}

ConvergenceStudy convergence_study(std::span<const int> k_grid, long long reps_per_k, double alpha,
                                   std::uint64_t seed, const ConvergenceOptions& opts) {
  if (reps_per_k < 2) throw DomainError("convergence_study: reps_per_k must be >= 2");
  check_alpha(alpha);
  for (int k : k_grid) {
    if (k < 1) throw DomainError("convergence_study: every k must be >= 1");
  }

  struct Slot {
    bool skipped = false;
    ConvergenceRecord record{};
  };
  std::vector<Slot> slots(k_grid.size());

  auto run_point = [&](std::size_t i) {
    const int k = k_grid[i];
    const double truth = nr_moments(NrDistribution(opts.truth, k, alpha)).mean;
    if (!(truth > 0.0)) {
      slots[i].skipped = true;
      return;
    }
    const auto batch = simulate_nr(k, alpha, reps_per_k, derive_seed(seed, static_cast<std::uint64_t>(k)),
                                   Regime::NrFolded, {.workers = 1});
    double sum = 0.0;
    for (double v : batch.values) sum += v;
    const double mean = sum / static_cast<double>(batch.values.size());
    slots[i].record = {k, mean, truth, std::abs(mean - truth) / std::abs(truth), mean / truth};
  };

  unsigned workers = opts.workers != 0 ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, k_grid.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < k_grid.size(); i = next++) run_point(i);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  ConvergenceStudy study;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].skipped) {
      study.skipped.push_back({k_grid[i], "expected N_R is not positive; relative error undefined"});
    } else {
      study.records.push_back(slots[i].record);
    }
  }
  return study;
}

ConvergenceFit ols_loglog(std::span<const ConvergenceRecord> records) {
  std::vector<double> xs;
  std::vector<double> ys;
  int excluded = 0;
  for (const auto& r : records) {
    if (!(r.abs_rel_error > 0.0)) {
      ++excluded;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(r.k)));
    ys.push_back(std::log(r.abs_rel_error));
  }
  const auto n = static_cast<int>(xs.size());
  if (n < 3) throw DomainError("ols_loglog: need at least 3 records with non-zero error");

  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("ols_loglog: all records share one k");

  ConvergenceFit fit{};
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += e * e;
  }
  fit.slope_se = std::sqrt(sse / (n - 2) / sxx);
  const boost::math::students_t t_dist(n - 2);
  const double t = boost::math::quantile(t_dist, 0.975);
  fit.slope_ci_lo = fit.slope - t * fit.slope_se;
  fit.slope_ci_hi = fit.slope + t * fit.slope_se;
  fit.n_points = n;
  fit.n_excluded = excluded;
  return fit;
}

}  // namespace failsafe
