#pragma once

#include <complex>
#include <string_view>

#include "failsafe/estimator.hpp"

namespace failsafe {

// Distribution of S = sum of k half-normal Z-scores, approximated by
// N(mu, sigma^2) with mu = k sqrt(2/pi) and sigma^2 = k (1 - 2/pi).
struct SumDistributionParams {
  int k = 0;
  double alpha = 0.0;
  double z_alpha = 0.0;
  double mu = 0.0;
  double sigma_sq = 0.0;
  double sigma = 0.0;
  // (mu - z_alpha sqrt(k)) / sigma; Phi(lambda) = P(S >= z_alpha sqrt(k)).
  double lambda = 0.0;

  // z_alpha * sqrt(k), the value of S at which N_R = 0.
  double truncation_point() const;
};

SumDistributionParams sum_params(int k, double alpha = kDefaultAlpha);

enum class Approach {
  Truncated,  // S truncated to S >= z_alpha sqrt(k); support n_r >= 0
  Folded,     // S folded at zero; support n_r > -k
};

std::string_view to_string(Approach a);
Approach parse_approach(std::string_view name);

struct NrDistribution {
  Approach approach;
  SumDistributionParams params;

  NrDistribution(Approach approach, const SumDistributionParams& params) : approach(approach), params(params) {}
  NrDistribution(Approach approach, int k, double alpha = kDefaultAlpha)
      : approach(approach), params(sum_params(k, alpha)) {}

  // Infimum of the support: 0 for Truncated, -k for Folded.
  double support_lower() const;
};

struct NrMoments {
  double mean;
  double variance;
  double epsilon;  // truncation correction to the mean; 0 for Folded
  double delta;    // truncation correction to the variance; 0 for Folded
};

// Frequency-dependent pieces of the truncated characteristic function.
struct CfIntermediates {
  double t;
  std::complex<double> mu1;
  std::complex<double> sigma1_sq;
};

// Density of the fail-safe estimator. Zero outside the support; the Folded
// density throws SingularityError at exactly n_r = -k.
double nr_pdf(double n_r, const NrDistribution& d);
double nr_cdf(double n_r, const NrDistribution& d);
double nr_quantile(double p, const NrDistribution& d);
NrMoments nr_moments(const NrDistribution& d);
CfIntermediates cf_intermediates(double t, const SumDistributionParams& p);
std::complex<double> nr_cf(double t, const NrDistribution& d);

// Truncated density without the 1 / Phi(lambda) normalizer, i.e. the large-k
// form shared by both approaches. Zero for n_r < 0.
double nr_pdf_asymptotic(double n_r, const SumDistributionParams& p);

}  // namespace failsafe
