#include "failsafe/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "failsafe/error.hpp"
#include "failsafe/normal.hpp"

namespace failsafe {

StudySet::StudySet(std::vector<double> z_scores) : z_(std::move(z_scores)) {
  if (z_.empty()) throw DomainError("study set must contain at least one study");
  for (std::size_t i = 0; i < z_.size(); ++i) {
    if (!std::isfinite(z_[i])) throw DomainError("study " + std::to_string(i + 1) + ": Z-score is not finite");
  }
}

StudySet StudySet::from_effects(std::span<const double> effects, std::span<const double> standard_errors) {
  if (effects.size() != standard_errors.size()) throw DomainError("effects and standard errors differ in length");
  std::vector<double> z(effects.size());
  for (std::size_t i = 0; i < effects.size(); ++i) {
    if (!(standard_errors[i] > 0.0)) {
      throw DomainError("study " + std::to_string(i + 1) + ": standard error must be > 0");
    }
    z[i] = effects[i] / standard_errors[i];
  }
  return StudySet(std::move(z));
}

// Summed in sorted order so the result does not depend on study order at all,
// not even in the last bit.
double StudySet::sum() const {
  std::vector<double> sorted = z_;
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0);
}

StudySet StudySet::with_study(double z) const {
  std::vector<double> next = z_;
  next.push_back(z);
  return StudySet(std::move(next));
}

void check_alpha(double alpha) {
  // alpha = 0.5 would make the critical value 0.
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
}

double z_alpha(double alpha) {
  check_alpha(alpha);
  return normal::quantile(1.0 - alpha);
}

StoufferResult stouffer_z(const StudySet& studies) {
  const double z = studies.sum() / std::sqrt(static_cast<double>(studies.k()));
  return {z, normal::ccdf(z)};
}

FailSafeReport fail_safe_n(const StudySet& studies, double alpha) {
  const double za = z_alpha(alpha);
  const double sum = studies.sum();
  const int k = studies.k();
  const auto stouffer = stouffer_z(studies);

  FailSafeReport r{};
  r.k = k;
  r.alpha = alpha;
  r.z_alpha = za;
  r.n_r_raw = sum * sum / (za * za) - k;
  r.n_r_reported = std::max(r.n_r_raw, 0.0);
  r.stouffer_z = stouffer.z;
  r.stouffer_p = stouffer.p;
  r.threshold = failsafe_threshold(k);
  r.minimal_bias = exceeds_failsafe_threshold(r.n_r_raw, k);
  return r;
}

}  // namespace failsafe
