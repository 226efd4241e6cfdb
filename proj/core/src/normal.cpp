#include "failsafe/normal.hpp"

#include <array>
#include <cmath>
#include <string>

#include "failsafe/error.hpp"
#include "failsafe/faddeeva.hpp"
#include "failsafe/rng.hpp"

namespace failsafe {
namespace normal {
namespace {

constexpr double kInvSqrt2 = 0.707106781186547524400844362104849039;
constexpr double kLogHalf = -0.693147180559945309417232121458176568;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be finite");
}

// Acklam's rational approximation for the lower half, relative error ~1e-9.
double quantile_guess(double p) {
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                           1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                           6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                           -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                           3.754408661907416e+00};
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// p <= 0.5. Halley iterations on Phi(x) - p, kept inside a bracket that
// shrinks with every evaluation; falls back to bisection when a step leaves it.
double quantile_lower(double p) {
  double x = quantile_guess(p);
  double lo = -40.0;
  double hi = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double err = cdf(x) - p;
    if (err > 0.0) hi = x; else lo = x;
    if (err == 0.0) return x;
    const double u = err / pdf(x);
    double next = x - u / (1.0 + 0.5 * x * u);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace

double pdf(double x) {
  require_finite(x, "std_normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double cdf(double x) {
  require_finite(x, "std_normal_cdf");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double ccdf(double x) {
  require_finite(x, "std_normal_ccdf");
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double log_cdf(double x) {
  require_finite(x, "std_normal_log_cdf");
  if (x < -1.0) return kLogHalf + std::log(faddeeva::erfcx(-x * kInvSqrt2)) - 0.5 * x * x;
  return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
}

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p in [0.5, 1).
  return p < 0.5 ? quantile_lower(p) : -quantile_lower(1.0 - p);
}

double mills_ratio(double x) {
  require_finite(x, "mills_ratio");
  if (x < -1.0) return kSqrt2OverPi / faddeeva::erfcx(-x * kInvSqrt2);
  return pdf(x) / cdf(x);
}

std::complex<double> log_cdf(std::complex<double> z) {
  const std::complex<double> u = -z * kInvSqrt2;
  if (u.real() >= 0.0) {
    // Phi(z) = exp(-u^2) w(iu) / 2 with iu in the upper half-plane.
    return kLogHalf - u * u + std::log(faddeeva::w({-u.imag(), u.real()}));
  }
  return std::log(1.0 - 0.5 * faddeeva::erfc(-u));
}

std::complex<double> cdf(std::complex<double> z) { return 0.5 * faddeeva::erfc(-z * kInvSqrt2); }

}  // namespace normal

FoldedNormalParams::FoldedNormalParams(double xi, double omega) : xi(xi), omega(omega) {
  if (!std::isfinite(xi)) throw DomainError("folded normal: xi must be finite");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("folded normal: omega must be > 0");
}

HalfNormalParams::HalfNormalParams(double omega) : omega(omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("half normal: omega must be > 0");
}

LeftTruncatedNormalParams::LeftTruncatedNormalParams(double mean, double sd, double lower)
    : mean(mean), sd(sd), lower(lower) {
  if (!std::isfinite(mean)) throw DomainError("truncated normal: mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw DomainError("truncated normal: sd must be > 0");
  if (std::isnan(lower)) throw DomainError("truncated normal: lower must not be NaN");
}

double folded_normal_pdf(double y, const FoldedNormalParams& p) {
  if (std::isnan(y)) throw DomainError("folded_normal_pdf: argument is NaN");
  if (y < 0.0 || std::isinf(y)) return 0.0;
  return (normal::pdf((y - p.xi) / p.omega) + normal::pdf((y + p.xi) / p.omega)) / p.omega;
}

double folded_normal_cdf(double y, const FoldedNormalParams& p) {
  if (std::isnan(y)) throw DomainError("folded_normal_cdf: argument is NaN");
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return 1.0;
  return normal::cdf((y - p.xi) / p.omega) - normal::cdf((-y - p.xi) / p.omega);
}

Moments folded_normal_moments(const FoldedNormalParams& p) {
  const double r = p.xi / p.omega;
  const double mean =
      p.omega * normal::kSqrt2OverPi * std::exp(-0.5 * r * r) + p.xi * (1.0 - 2.0 * normal::cdf(-r));
  return {mean, p.xi * p.xi + p.omega * p.omega - mean * mean};
}

double half_normal_pdf(double y, const HalfNormalParams& p) { return folded_normal_pdf(y, p.as_folded()); }

double half_normal_cdf(double y, const HalfNormalParams& p) {
  if (std::isnan(y)) throw DomainError("half_normal_cdf: argument is NaN");
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return 1.0;
  return std::erf(y / (p.omega * std::numbers::sqrt2));
}

double left_truncated_normal_pdf(double x, const LeftTruncatedNormalParams& p) {
  if (std::isnan(x)) throw DomainError("left_truncated_normal_pdf: argument is NaN");
  if (x < p.lower || std::isinf(x)) return 0.0;
  const double survival = std::isinf(p.lower) ? (p.lower < 0 ? 1.0 : 0.0) : normal::ccdf((p.lower - p.mean) / p.sd);
  if (survival < 1e-300) throw OverflowError("left_truncated_normal_pdf: survival mass below truncation point underflows");
  return normal::pdf((x - p.mean) / p.sd) / (p.sd * survival);
}

double sample_half_normal(const HalfNormalParams& p, Rng& rng) { return p.omega * std::abs(rng.normal()); }

}  // namespace failsafe
