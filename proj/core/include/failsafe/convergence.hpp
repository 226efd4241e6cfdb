#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "failsafe/estimator.hpp"
#include "failsafe/nr_distribution.hpp"

namespace failsafe {

struct ConvergenceRecord {
  int k;
  double mean_estimate;
  double true_value;
  double abs_rel_error;  // |mean_estimate - true_value| / |true_value|
  double ratio;          // mean_estimate / true_value
};

struct SkippedPoint {
  int k;
  std::string reason;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRecord> records;
  std::vector<SkippedPoint> skipped;
};

struct ConvergenceOptions {
  // Which closed-form mean is taken as the truth.
  Approach truth = Approach::Folded;
  unsigned workers = 0;
};

// For every k, averages reps_per_k folded-regime N_R draws and compares the
// mean with the closed-form expectation. Points whose truth is not positive
// are skipped. Each k has its own RNG stream family, so results do not depend
// on grid order or worker count.
ConvergenceStudy convergence_study(std::span<const int> k_grid, long long reps_per_k, double alpha,
                                   std::uint64_t seed, const ConvergenceOptions& opts = {});

std::vector<int> k_grid(int k_min, int k_max, int step);

struct ConvergenceFit {
  double slope;
  double intercept;
  double slope_ci_lo;
  double slope_ci_hi;
  double slope_se;
  int n_points;
  int n_excluded;  // records with zero error, which have no logarithm
};

// OLS of log(abs_rel_error) on log(k) (natural logs) with a 95% t interval on
// the slope. Needs at least 3 usable records.
ConvergenceFit ols_loglog(std::span<const ConvergenceRecord> records);

}  // namespace failsafe
