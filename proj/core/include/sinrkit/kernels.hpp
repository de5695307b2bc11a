#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sinrkit/mellin_barnes.hpp"
#include "sinrkit/weights.hpp"

namespace sinrkit {

// Coefficients (ascending powers) of the monic polynomial p_l biorthogonal to
// the dual functions q_m under the product weight.
Poly poly_p_coefficients(const WeightFunctions& wf, int l);
double poly_p(const WeightFunctions& wf, int l, double x);

// Polynomial evaluation hardened against the catastrophic cancellation of
// alternating binomial sums at large degree: compensated (error-free
// transformation) Horner, with a double-double fallback when the estimated
// cancellation exceeds 1e-8 relative.
double poly_eval(const Poly& p, double x);

// Regular part of the dual function q_l. For deep truncated-unitary
// ensembles (l >= boundary_threshold) q_l additionally carries derivatives of
// a point mass at y = 1, reported by weight_q_boundary; the pointwise value
// here is the regular density alone.
double weight_q(const WeightFunctions& wf, int l, double y);

struct BoundaryTerm {
  int derivative_order;  // order of the test-function derivative at y = 1
  double coeff;
};

// Boundary contributions of q_l at y = 1: acting on a smooth test function
// psi adds sum_i coeff_i * psi^(order_i)(1). Empty when q_l is regular.
std::vector<BoundaryTerm> weight_q_boundary(const WeightFunctions& wf, int l);

// Exact action of q_l on a polynomial test function (ascending coefficients),
// including boundary terms. Uses closed-form moments, no quadrature.
double weight_q_apply_poly(const WeightFunctions& wf, int l, const Poly& psi);

// Correlation kernel via its contour-product integral representation
//   K(x, y) = -n_t * (M omega(n_t+1) / M omega(n_t))
//             * Integral_0^1 p_{n_t-1}(x u) q_{n_t}(y u) du.
double kernel_K(const WeightFunctions& wf, int n_t, double x, double y,
                double tol = 1e-10);

// Same kernel as the finite biorthogonal sum sum_{j<n_t} p_j(x) q_j(y).
double kernel_K_sum(const WeightFunctions& wf, int n_t, double x, double y);

// K(0, y) in closed form, evaluated analytically (a single inverse-Mellin
// integral for Gaussian products, a symbolic expansion for truncated-unitary
// products). No numerical differentiation is involved.
double kernel_K0(const WeightFunctions& wf, int n_t, double y);

// A kernel evaluator handed to the ensemble-agnostic density and rate
// formulas, with its domain of validity spelled out.
struct KernelHandle {
  std::function<double(double, double)> eval;      // K(x, y)
  std::function<double(double)> eval_at_zero;      // K(0, y)
  int n_t = 2;
  // Validity annotations: the (x, y) box the evaluator is trusted on.
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  std::string notes;
};

// Handle backed by the biorthogonal machinery of a product ensemble.
KernelHandle make_kernel_handle(std::shared_ptr<const WeightFunctions> wf,
                                int n_t);

// Handle wrapping a caller-supplied kernel (generic_kernel ensembles).
KernelHandle make_kernel_handle(const EnsembleSpec& spec);

}  // namespace sinrkit
