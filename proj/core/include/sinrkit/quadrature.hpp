#pragma once

#include <functional>

namespace sinrkit {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // absolute error estimate
  long evaluations = 0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod 15(7) on a finite interval. Subdivision stops when
// the local error estimate meets its share of max(tol_abs, tol_rel*|I|).
// Throws MaxDepthExceeded when refinement stalls, unless throw_on_failure is
// false, in which case the best estimate comes back with converged = false.
QuadResult quad_adaptive(const std::function<double(double)>& f, double a,
                         double b, double tol_abs = 1e-10,
                         double tol_rel = 1e-10, int max_depth = 48,
                         bool throw_on_failure = true);

// Integral over [a, infinity), computed through the compactifying map
// x = a + t/(1-t), dx = dt/(1-t)^2, t in [0,1).
QuadResult quad_to_infinity(const std::function<double(double)>& f, double a,
                            double tol_abs = 1e-10, double tol_rel = 1e-10,
                            int max_depth = 48, bool throw_on_failure = true);

}  // namespace sinrkit
