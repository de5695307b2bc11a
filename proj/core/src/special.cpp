#include "sinrkit/special.hpp"

#include <cmath>
#include <limits>

#include "sinrkit/errors.hpp"

namespace sinrkit {

namespace {

// Lanczos approximation, g = 7, 9 terms. Relative error around 1e-13 across
// the right half-plane, which the reflection formula then carries left.
constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoeff[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

bool is_nonpositive_integer(std::complex<double> z) {
  return z.imag() == 0.0 && z.real() <= 0.0 &&
         z.real() == std::floor(z.real());
}

// Log-gamma via Lanczos for Re z >= 0.5.
std::complex<double> log_gamma_right(std::complex<double> z) {
  // The sum is written for Gamma(z) with the classical z-1 shift.
  const std::complex<double> zm1 = z - 1.0;
  std::complex<double> acc = kLanczosCoeff[0];
  for (int i = 1; i < 9; ++i) {
    acc += kLanczosCoeff[i] / (zm1 + static_cast<double>(i));
  }
  const std::complex<double> t = zm1 + kLanczosG + 0.5;
  return kLogSqrt2Pi + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

// A logarithm of sin(pi z) that never overflows for large |Im z|. The value
// can differ from the principal branch by a multiple of 2*pi*i, which is
// harmless to every consumer in this library (results are exponentiated or
// evaluated on the real axis).
std::complex<double> log_sin_pi(std::complex<double> z) {
  if (std::abs(z.imag()) < 32.0) {
    return std::log(std::sin(kPi * z));
  }
  if (z.imag() > 0.0) {
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}), |e^{2 i pi z}| << 1
    const std::complex<double> i(0.0, 1.0);
    return std::complex<double>(-std::log(2.0), kPi / 2.0) - i * kPi * z +
           std::log(1.0 - std::exp(2.0 * i * kPi * z));
  }
  return std::conj(log_sin_pi(std::conj(z)));
}

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
  if (is_nonpositive_integer(z)) {
    throw PoleAtNonpositiveInteger("log_gamma: argument " +
                                   std::to_string(z.real()) +
                                   " is a pole of Gamma");
  }
  if (z.imag() == 0.0 && z.real() > 0.0) {
    return {log_gamma(z.real()), 0.0};
  }
  if (z.imag() < 0.0) {
    return std::conj(log_gamma(std::conj(z)));
  }
  if (z.real() >= 0.5) {
    return log_gamma_right(z);
  }
  // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z).
  return std::log(kPi) - log_sin_pi(z) - log_gamma_right(1.0 - z);
}

double log_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) {
    throw PoleAtNonpositiveInteger("log_gamma: argument " +
                                   std::to_string(x) + " is a pole of Gamma");
  }
  if (x > 0.0) {
    // libm lgamma keeps relative accuracy even near the zeros at 1 and 2.
    return std::lgamma(x);
  }
  // Negative non-integer: reflection against the positive axis. The result is
  // log|Gamma(x)| plus i*pi*floor(x) in the full complex convention; callers
  // needing the sign use the complex overload.
  return std::log(kPi / std::abs(std::sin(kPi * x))) - std::lgamma(1.0 - x);
}

double harmonic_number(int n) {
  if (n < 0) {
    throw ConfigError("harmonic_number: n must be >= 0");
  }
  long double acc = 0.0L;
  for (int k = n; k >= 1; --k) {
    acc += 1.0L / static_cast<long double>(k);
  }
  return static_cast<double>(acc);
}

double digamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) {
    throw PoleAtNonpositiveInteger("digamma: argument " + std::to_string(x) +
                                   " is a pole");
  }
  if (x > 0.0 && x == std::floor(x) && x <= 1.0e6) {
    // psi(n) = H_{n-1} - gamma, computed in extended precision so that the
    // identity against harmonic_number round-trips at double precision.
    long double acc = 0.0L;
    for (long k = static_cast<long>(x) - 1; k >= 1; --k) {
      acc += 1.0L / static_cast<long double>(k);
    }
    return static_cast<double>(
        acc - 0.57721566490153286060651209008240243104L);
  }
  if (x < 0.0) {
    // psi(x) = psi(1 - x) - pi / tan(pi x)
    return digamma(1.0 - x) - kPi / std::tan(kPi * x);
  }
  double result = 0.0;
  while (x < 8.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli-number coefficients.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = -0.5 * inv;
  static constexpr double kBernTerm[7] = {
      -1.0 / 12.0,   1.0 / 120.0,    -1.0 / 252.0,  1.0 / 240.0,
      -1.0 / 132.0,  691.0 / 32760.0, -1.0 / 12.0,
  };
  double p = inv2;
  for (int i = 0; i < 7; ++i) {
    series += kBernTerm[i] * p;
    p *= inv2;
  }
  return result + std::log(x) + series;
}

double gamma_fn(double x) {
  if (x > 0.0) {
    return std::exp(std::lgamma(x));
  }
  if (x == std::floor(x)) {
    throw PoleAtNonpositiveInteger("gamma_fn: argument " + std::to_string(x) +
                                   " is a pole");
  }
  // Reflection keeps the sign right for negative non-integers.
  return kPi / (std::sin(kPi * x) * std::exp(std::lgamma(1.0 - x)));
}

}  // namespace sinrkit
