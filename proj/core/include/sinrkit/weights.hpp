#pragma once

#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <optional>

#include "sinrkit/ensemble.hpp"
#include "sinrkit/mellin_barnes.hpp"
#include "sinrkit/polylog.hpp"

namespace sinrkit {

// Spectral-weight toolbox for a product ensemble: the weight omega, its
// derivatives, and the Mellin transform every closed-form density and rate
// expression is built from. Gaussian products evaluate through the
// Mellin-Barnes engine; truncated-unitary (Jacobi) products carry an exact
// finite power-log expansion extracted once at construction.
//
// Instances cache derived series lazily behind an internal lock; every
// evaluator is const and safe to call concurrently from multiple threads.
class WeightFunctions {
 public:
  explicit WeightFunctions(EnsembleSpec spec);

  const EnsembleSpec& spec() const { return spec_; }
  bool is_gaussian() const {
    return spec_.kind == EnsembleKind::kGaussianProduct;
  }
  bool is_jacobi() const {
    return spec_.kind == EnsembleKind::kJacobiProduct;
  }

  // Mellin transform of omega at real s; positive for s > -min(nu).
  double mellin(double s) const;
  // log of the Mellin transform continued to complex s (principal values of
  // each log-gamma; consumers exponentiate).
  std::complex<double> log_mellin(std::complex<double> s) const;

  // The weight density. Gaussian: supported on (0, inf). Jacobi: supported on
  // (0, 1]; zero is returned beyond 1.
  double omega(double x) const;

  // order-th derivative of omega at x (order 0 = omega itself). Derivatives
  // are analytic evaluations, never finite differences.
  double omega_derivative(double x, int order) const;

  // Exact expansion of the Jacobi weight on (0, 1); nullptr for Gaussian.
  const PolyLogSeries* series() const {
    return series_ ? &*series_ : nullptr;
  }
  // Cached order-th derivative of that expansion (Jacobi only).
  const PolyLogSeries& series_derivative(int order) const;

  // Smallest l at which the dual function q_l stops being a plain function
  // and picks up boundary terms at x = 1: sum of (mu_j - nu_j) for Jacobi,
  // effectively infinite for Gaussian.
  int boundary_threshold() const { return boundary_threshold_; }

 private:
  EnsembleSpec spec_;
  std::optional<PolyLogSeries> series_;
  mutable std::mutex series_mutex_;
  mutable std::map<int, PolyLogSeries> series_derivs_;
  int boundary_threshold_ = std::numeric_limits<int>::max();
};

// Free-function views of the toolbox, matching the operation vocabulary used
// across the library.
double mellin_omega(const WeightFunctions& wf, double s);
double weight_omega(const WeightFunctions& wf, double x);

}  // namespace sinrkit
