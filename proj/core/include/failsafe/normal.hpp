#pragma once

#include <complex>
#include <numbers>

namespace failsafe {

class Rng;

namespace normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
// E|Z| for Z ~ N(0, 1).
inline constexpr double kSqrt2OverPi = 0.797884560802865355879892119868763737;
inline constexpr double kHalfNormalVarFactor = 1.0 - 2.0 / std::numbers::pi;

// Standard normal density, distribution function and quantile. The scalar
// functions throw DomainError on non-finite input.
double pdf(double x);
double cdf(double x);
// Upper tail 1 - cdf(x), accurate for large positive x.
double ccdf(double x);
double log_cdf(double x);
double quantile(double p);

// phi(x) / Phi(x), stable for large negative x where both vanish.
double mills_ratio(double x);

// Phi continued to complex arguments, Phi(z) = erfc(-z / sqrt 2) / 2.
std::complex<double> cdf(std::complex<double> z);
std::complex<double> log_cdf(std::complex<double> z);

}  // namespace normal

// |X| for X ~ N(xi, omega^2).
struct FoldedNormalParams {
  double xi;
  double omega;

  FoldedNormalParams(double xi, double omega);
};

struct HalfNormalParams {
  double omega;

  explicit HalfNormalParams(double omega = 1.0);
  FoldedNormalParams as_folded() const { return {0.0, omega}; }
};

// N(mean, sd^2) restricted to [lower, inf).
struct LeftTruncatedNormalParams {
  double mean;
  double sd;
  double lower;

  LeftTruncatedNormalParams(double mean, double sd, double lower);
};

struct Moments {
  double mean;
  double variance;
};

// Densities return 0 outside their support.
double folded_normal_pdf(double y, const FoldedNormalParams& p);
double folded_normal_cdf(double y, const FoldedNormalParams& p);
Moments folded_normal_moments(const FoldedNormalParams& p);

double half_normal_pdf(double y, const HalfNormalParams& p);
double half_normal_cdf(double y, const HalfNormalParams& p);

// Throws OverflowError when the survival mass above `lower` is below 1e-300.
double left_truncated_normal_pdf(double x, const LeftTruncatedNormalParams& p);

// |omega * N(0, 1)|.
double sample_half_normal(const HalfNormalParams& p, Rng& rng);

}  // namespace failsafe
