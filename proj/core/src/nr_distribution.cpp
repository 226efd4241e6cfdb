#include "failsafe/nr_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "failsafe/error.hpp"
#include "failsafe/normal.hpp"

namespace failsafe {
namespace {

using cplx = std::complex<double>;

constexpr double kLogInvSqrt2Pi = -0.918938533204672741780329736405617640;

double log_phi(double x) { return kLogInvSqrt2Pi - 0.5 * x * x; }

void require_not_nan(double x, const char* what) {
  if (std::isnan(x)) throw DomainError(std::string(what) + ": argument is NaN");
}

}  // namespace

double SumDistributionParams::truncation_point() const { return z_alpha * std::sqrt(static_cast<double>(k)); }

SumDistributionParams sum_params(int k, double alpha) {
  if (k < 1) throw DomainError("k must be >= 1");
  SumDistributionParams p;
  p.k = k;
  p.alpha = alpha;
  p.z_alpha = z_alpha(alpha);
  p.mu = k * normal::kSqrt2OverPi;
  p.sigma_sq = k * normal::kHalfNormalVarFactor;
  p.sigma = std::sqrt(p.sigma_sq);
  p.lambda = (p.mu - p.truncation_point()) / p.sigma;
  return p;
}

std::string_view to_string(Approach a) { return a == Approach::Truncated ? "truncated" : "folded"; }

Approach parse_approach(std::string_view name) {
  if (name == "truncated") return Approach::Truncated;
  if (name == "folded") return Approach::Folded;
  throw DomainError("unknown approach '" + std::string(name) + "' (expected truncated or folded)");
}

double NrDistribution::support_lower() const { return approach == Approach::Truncated ? 0.0 : -params.k; }

double nr_pdf(double n_r, const NrDistribution& d) {
  require_not_nan(n_r, "nr_pdf");
  const auto& p = d.params;
  const double shifted = n_r + p.k;
  if (std::isinf(n_r)) return 0.0;

  if (d.approach == Approach::Truncated) {
    if (n_r < 0.0) return 0.0;
    const double r = std::sqrt(shifted);
    const double u = (p.z_alpha * r - p.mu) / p.sigma;
    return p.z_alpha / (2.0 * p.sigma * r) * std::exp(log_phi(u) - normal::log_cdf(p.lambda));
  }

  if (shifted < 0.0) return 0.0;
  if (shifted == 0.0) {
    throw SingularityError("nr_pdf: folded density is unbounded at n_r = -k (" + std::to_string(p.k) + ")");
  }
  const double r = std::sqrt(shifted);
  const double u = (p.z_alpha * r - p.mu) / p.sigma;
  const double v = (p.z_alpha * r + p.mu) / p.sigma;
  return p.z_alpha / (2.0 * p.sigma * r) * (normal::pdf(u) + normal::pdf(v));
}

double nr_pdf_asymptotic(double n_r, const SumDistributionParams& p) {
  require_not_nan(n_r, "nr_pdf_asymptotic");
  if (n_r < 0.0 || std::isinf(n_r)) return 0.0;
  const double r = std::sqrt(n_r + p.k);
  const double u = (p.z_alpha * r - p.mu) / p.sigma;
  return p.z_alpha / (2.0 * p.sigma * r) * normal::pdf(u);
}

double nr_cdf(double n_r, const NrDistribution& d) {
  require_not_nan(n_r, "nr_cdf");
  const auto& p = d.params;
  if (n_r <= d.support_lower()) return 0.0;
  if (std::isinf(n_r)) return 1.0;
  const double r = std::sqrt(n_r + p.k);
  const double u = (p.z_alpha * r - p.mu) / p.sigma;

  if (d.approach == Approach::Truncated) {
    // P(S* > s) = Phi(-u) / Phi(lambda), formed in log space so that tiny
    // Phi(lambda) does not underflow.
    const double survival = std::exp(normal::log_cdf(-u) - normal::log_cdf(p.lambda));
    return std::clamp(1.0 - survival, 0.0, 1.0);
  }
  const double v = (p.z_alpha * r + p.mu) / p.sigma;
  return std::clamp(normal::cdf(u) - normal::cdf(-v), 0.0, 1.0);
}

double nr_quantile(double p, const NrDistribution& d) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("nr_quantile: p must lie in (0, 1)");
  const auto m = nr_moments(d);
  const double sd = std::sqrt(m.variance);

  double lo = d.support_lower();
  double hi = std::max(lo + sd, m.mean + 10.0 * sd);
  while (nr_cdf(hi, d) < p) {
    lo = hi;
    hi = d.support_lower() + 2.0 * (hi - d.support_lower());
    if (!std::isfinite(hi)) throw DomainError("nr_quantile: failed to bracket the quantile");
  }

  // Newton steps on the cdf, falling back to bisection when a step leaves the
  // current bracket.
  double x = std::clamp(m.mean, lo, hi);
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double err = nr_cdf(x, d) - p;
    if (err == 0.0) return x;
    if (err > 0.0) hi = x; else lo = x;
    if (hi - lo <= 1e-13 * (1.0 + std::abs(x))) break;
    const double dens = nr_pdf(x, d);
    double next = dens > 0.0 ? x - err / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

NrMoments nr_moments(const NrDistribution& d) {
  const auto& p = d.params;
  const double z2 = p.z_alpha * p.z_alpha;
  const double z4 = z2 * z2;
  const double mu2 = p.mu * p.mu;

  NrMoments m{};
  m.mean = (mu2 + p.sigma_sq) / z2 - p.k;
  m.variance = 2.0 * p.sigma_sq * (2.0 * mu2 + p.sigma_sq) / z4;
  if (d.approach == Approach::Folded) return m;

  // Second and fourth moments of N(mu, sigma^2) truncated below at
  // a = z_alpha sqrt(k), written as corrections to the untruncated values.
  const double mills = normal::mills_ratio(p.lambda);
  const double a = p.truncation_point();
  const double s = p.sigma;
  m.epsilon = mills * s * (p.mu + a) / z2;
  m.delta = mills * (s * s * s * (3.0 * p.mu + a) - (mills + p.lambda) * p.sigma_sq * (p.mu + a) * (p.mu + a)) / z4;
  m.mean += m.epsilon;
  m.variance += m.delta;
  return m;
}

CfIntermediates cf_intermediates(double t, const SumDistributionParams& p) {
  const double z2 = p.z_alpha * p.z_alpha;
  const cplx denom(z2, -2.0 * p.sigma_sq * t);
  return {t, cplx(0.0, 2.0 * p.mu * p.sigma * t) / denom, z2 / denom};
}

std::complex<double> nr_cf(double t, const NrDistribution& d) {
  if (!std::isfinite(t)) throw DomainError("nr_cf: t must be finite");
  if (t == 0.0) return {1.0, 0.0};
  const auto& p = d.params;
  const double z2 = p.z_alpha * p.z_alpha;
  const cplx denom(z2, -2.0 * p.sigma_sq * t);
  // Principal square root: Re(denom) > 0, so the branch is continuous in t.
  const cplx root = std::sqrt(denom);
  const cplx exponent = cplx(0.0, p.mu * p.mu * t) / denom - cplx(0.0, p.k * t);
  const cplx folded = p.z_alpha * std::exp(exponent) / root;
  if (d.approach == Approach::Folded) return folded;

  const auto ci = cf_intermediates(t, p);
  const cplx sigma1 = p.z_alpha / root;
  const cplx w = (ci.mu1 + p.lambda) / sigma1;
  return std::exp(normal::log_cdf(w) - normal::log_cdf(p.lambda)) * folded;
}

}  // namespace failsafe
