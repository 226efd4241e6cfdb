#pragma once

#include <span>
#include <vector>

namespace failsafe {

inline constexpr double kDefaultAlpha = 0.05;

// Per-study standard normal deviates. Always holds at least one finite value.
class StudySet {
 public:
  explicit StudySet(std::vector<double> z_scores);

  // Z_i = effect_i / se_i; every se_i must be > 0.
  static StudySet from_effects(std::span<const double> effects, std::span<const double> standard_errors);

  std::span<const double> z_scores() const { return z_; }
  int k() const { return static_cast<int>(z_.size()); }
  double sum() const;

  // Returns a copy with one more study appended.
  StudySet with_study(double z) const;

 private:
  std::vector<double> z_;
};

struct StoufferResult {
  double z;
  double p;  // one-tailed, 1 - Phi(z)
};

struct FailSafeReport {
  int k;
  double alpha;
  double z_alpha;
  double n_r_raw;       // may be negative (all-null studies give -k)
  double n_r_reported;  // max(n_r_raw, 0)
  double stouffer_z;
  double stouffer_p;
  double threshold;     // 5k + 10
  bool minimal_bias;    // n_r_raw > threshold
};

// Throws DomainError unless alpha lies in (0, 0.5).
void check_alpha(double alpha);
// One-tailed critical value Phi^{-1}(1 - alpha).
double z_alpha(double alpha);

StoufferResult stouffer_z(const StudySet& studies);
FailSafeReport fail_safe_n(const StudySet& studies, double alpha = kDefaultAlpha);

// 5k + 10 tolerance level for the fail-safe number.
inline double failsafe_threshold(int k) { return 5.0 * k + 10.0; }
inline bool exceeds_failsafe_threshold(double n_r_raw, int k) { return n_r_raw > failsafe_threshold(k); }

}  // namespace failsafe
