#pragma once

#include <complex>

namespace failsafe::faddeeva {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz), valid over the whole complex
// plane. The upper half-plane is evaluated with Weideman's rational expansion;
// the lower half-plane follows from w(z) = 2 exp(-z^2) - w(-z).
std::complex<double> w(std::complex<double> z);

// Complex complementary error function.
std::complex<double> erfc(std::complex<double> z);

// Scaled real complementary error function exp(x^2) erfc(x).
double erfcx(double x);

}  // namespace failsafe::faddeeva
