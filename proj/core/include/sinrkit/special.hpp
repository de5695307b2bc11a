#pragma once

#include <complex>

namespace sinrkit {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Principal-branch log-gamma, continuous in the cut plane. Real arguments take
// a dedicated high-accuracy path; complex arguments use a Lanczos sum with
// reflection for Re z < 1/2. Throws PoleAtNonpositiveInteger at the poles.
std::complex<double> log_gamma(std::complex<double> z);

// Real log Gamma for x > 0 (relative accuracy of the underlying libm).
double log_gamma(double x);

// Digamma for real x (poles excluded). Exact positive integers are evaluated
// through the harmonic series so that digamma(n) + euler_gamma and
// harmonic_number(n-1) agree to the last bit or one ulp.
double digamma(double x);

// H_n = sum_{k=1..n} 1/k, accumulated in extended precision.
double harmonic_number(int n);

// Gamma(x) for real x away from poles (convenience; goes through log_gamma).
double gamma_fn(double x);

}  // namespace sinrkit
