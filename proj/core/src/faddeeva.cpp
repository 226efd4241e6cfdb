#include "failsafe/faddeeva.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace failsafe::faddeeva {
namespace {

using cplx = std::complex<double>;

// Weideman (1994), "Computation of the complex error function". The
// expansion is in powers of (L + iz) / (L - iz); kTerms terms give close to
// double precision away from the far real axis.
constexpr int kTerms = 40;

struct Expansion {
  double L;
  std::array<double, kTerms> a;  // a[n] multiplies Z^n
};

Expansion make_expansion() {
  constexpr int M = 2 * kTerms;
  Expansion e{};
  e.L = std::sqrt(kTerms / std::numbers::sqrt2);
  const double L2 = e.L * e.L;
  auto g = [&](int k) {
    const double t = e.L * std::tan(0.5 * k * std::numbers::pi / M);
    return std::exp(-t * t) * (L2 + t * t);
  };
  // Real DFT of the even sequence g(-M+1..M-1), g(-M) = 0, length 2M.
  std::array<double, M> gk{};
  for (int k = 0; k < M; ++k) gk[k] = g(k);
  for (int n = 1; n <= kTerms; ++n) {
    double acc = gk[0];
    for (int k = 1; k < M; ++k) acc += 2.0 * gk[k] * std::cos(std::numbers::pi * k * n / M);
    e.a[n - 1] = acc / (2.0 * M);
  }
  return e;
}

const Expansion& expansion() {
  static const Expansion e = make_expansion();
  return e;
}

// Laplace continued fraction, accurate for large |z| in the upper half-plane.
cplx w_continued_fraction(cplx z) {
  constexpr int kDepth = 60;
  cplx acc = z;
  for (int n = kDepth; n >= 1; --n) acc = z - (0.5 * n) / acc;
  return cplx(0.0, 1.0 / std::sqrt(std::numbers::pi)) / acc;
}

cplx w_upper(cplx z) {
  if (std::abs(z) > 12.0) return w_continued_fraction(z);
  const Expansion& e = expansion();
  const cplx iz(-z.imag(), z.real());
  const cplx denom = e.L - iz;
  const cplx Z = (e.L + iz) / denom;
  cplx p = 0.0;
  for (int n = kTerms - 1; n >= 0; --n) p = p * Z + e.a[n];
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

}  // namespace

cplx w(cplx z) {
  if (z.imag() >= 0.0) return w_upper(z);
  return 2.0 * std::exp(-z * z) - w_upper(-z);
}

cplx erfc(cplx z) {
  // erfc(z) = exp(-z^2) w(iz); iz lies in the upper half-plane iff Re z >= 0.
  if (z.real() >= 0.0) return std::exp(-z * z) * w_upper(cplx(-z.imag(), z.real()));
  return 2.0 - std::exp(-z * z) * w_upper(cplx(z.imag(), -z.real()));
}

double erfcx(double x) {
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 20.0) return w_upper(cplx(0.0, x)).real();
  // Asymptotic series; the first omitted term is below 1e-17 relative here.
  const double inv2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 6; ++n) {
    term *= -(2 * n - 1) * inv2;
    sum += term;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

}  // namespace failsafe::faddeeva
