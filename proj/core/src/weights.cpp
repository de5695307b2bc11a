#include "sinrkit/weights.hpp"

#include <cmath>
#include <string>

#include "sinrkit/errors.hpp"
#include "sinrkit/special.hpp"

namespace sinrkit {

namespace {

// Coefficients of prod_{i=1}^{k} (s + i).
Poly rising_factor_poly(int k) {
  Poly p{1.0};
  for (int i = 1; i <= k; ++i) {
    Poly next(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j] += p[j] * static_cast<double>(i);
      next[j + 1] += p[j];
    }
    p = std::move(next);
  }
  return p;
}

// Inverse-Mellin integrand of the order-th derivative of a Gaussian-product
// weight: F(s) = prod_{i=1..order}(s+i) * prod_j Gamma(nu_j - order - s).
MellinBarnesIntegrand gaussian_derivative_integrand(
    const std::vector<int>& nu, int order) {
  MellinBarnesIntegrand mb;
  for (int n : nu) {
    mb.add_gamma(static_cast<double>(n - order), -1, +1);
  }
  if (order > 0) {
    mb.add_poly_numer(rising_factor_poly(order));
  }
  return mb;
}

}  // namespace

WeightFunctions::WeightFunctions(EnsembleSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  if (!spec_.is_product()) {
    throw ConfigError(
        "ensemble.kind: weight functions exist only for product ensembles");
  }
  if (is_jacobi()) {
    MellinBarnesIntegrand mb;
    for (int n : spec_.nu) mb.add_gamma(static_cast<double>(n), -1, +1);
    for (int m : spec_.mu) mb.add_gamma(static_cast<double>(m), -1, -1);
    series_ = mb.exact_polylog();
    int threshold = 0;
    for (int j = 0; j < spec_.M; ++j) {
      threshold += spec_.mu[j] - spec_.nu[j];
    }
    boundary_threshold_ = threshold;
  }
}

double WeightFunctions::mellin(double s) const {
  double log_acc = 0.0;
  for (int n : spec_.nu) {
    if (s + n <= 0.0) {
      throw ConfigError("mellin_omega: argument " + std::to_string(s) +
                        " is outside the convergence half-plane");
    }
    log_acc += log_gamma(s + static_cast<double>(n));
  }
  if (is_jacobi()) {
    for (int m : spec_.mu) {
      log_acc -= log_gamma(s + static_cast<double>(m));
    }
  }
  return std::exp(log_acc);
}

std::complex<double> WeightFunctions::log_mellin(
    std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (int n : spec_.nu) {
    acc += log_gamma(s + static_cast<double>(n));
  }
  if (is_jacobi()) {
    for (int m : spec_.mu) {
      acc -= log_gamma(s + static_cast<double>(m));
    }
  }
  return acc;
}

double WeightFunctions::omega(double x) const {
  return omega_derivative(x, 0);
}

const PolyLogSeries& WeightFunctions::series_derivative(int order) const {
  if (!series_) {
    throw ConfigError(
        "series_derivative: exact expansions exist only for jacobi_product "
        "ensembles");
  }
  // Map node references stay valid across later insertions, so the returned
  // reference is safe to use after the lock is released.
  std::lock_guard<std::mutex> lock(series_mutex_);
  auto it = series_derivs_.find(order);
  if (it != series_derivs_.end()) return it->second;
  if (series_derivs_.empty()) series_derivs_.emplace(0, *series_);
  int top = series_derivs_.rbegin()->first;
  while (top < order) {
    series_derivs_.emplace(top + 1, series_derivs_.at(top).derivative());
    ++top;
  }
  return series_derivs_.at(order);
}

double WeightFunctions::omega_derivative(double x, int order) const {
  if (!(x > 0.0)) {
    throw ConfigError("weight_omega: argument must be positive");
  }
  if (order < 0) {
    throw ConfigError("weight_omega: derivative order must be >= 0");
  }
  if (is_jacobi()) {
    if (x > 1.0) return 0.0;
    return series_derivative(order).eval(x);
  }
  MellinBarnesIntegrand mb =
      gaussian_derivative_integrand(spec_.nu, order);
  return eval_inverse_mellin(mb, x, nullptr, 1e-12, 1e-11,
                             "for the product weight derivative of order " +
                                 std::to_string(order));
}

double mellin_omega(const WeightFunctions& wf, double s) {
  return wf.mellin(s);
}

double weight_omega(const WeightFunctions& wf, double x) {
  return wf.omega(x);
}

}  // namespace sinrkit
