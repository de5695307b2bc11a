#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sinrkit/ensemble.hpp"
#include "sinrkit/kernels.hpp"
#include "sinrkit/weights.hpp"

namespace sinrkit {

struct DensityPoint {
  double gamma = 0.0;
  double density = 0.0;
  double error = 0.0;  // absolute error estimate for the density value
};

struct DensityCurve {
  std::vector<DensityPoint> points;
  Receiver receiver = Receiver::kZf;
  double delta = 1.0;
  double sigma_k = 1.0;
  std::string method;
};

struct GridSpec {
  bool auto_grid = true;  // pick the range from the density's own support
  double lo = 0.0;
  double hi = 0.0;
  int points = 600;
};

struct SumRateResult {
  double value_nats = 0.0;
  std::vector<double> per_stream;  // nats, one entry per transmit stream
  std::string method;  // "meijer_closed_form" or "kernel_quadrature"
  double error_estimate = 0.0;
};

inline constexpr const char* kMethodClosedForm = "meijer_closed_form";
inline constexpr const char* kMethodQuadrature = "kernel_quadrature";

// ---- zero-forcing receiver ----

// Density of the per-stream output SINR via the weight shortcut
//   rho(g) = (sigma_k / (delta * Momega(1))) * omega(sigma_k * g / delta);
// single-factor Gaussian products take an elementary-function branch.
double zf_pdf_specialized(const WeightFunctions& wf, double delta,
                          double sigma_k, double gamma);

// Same density through the ensemble-agnostic kernel representation
//   rho(g) = (n_t - 1)(sigma_k/delta) Integral_0^1 K(0, sigma_k g x / delta)
//            (1-x)^{n_t-2} x dx,
// accurate to tol absolutely.
double zf_pdf_generic(const KernelHandle& kernel, double delta,
                      double sigma_k, double gamma, double tol = 1e-9);

// Ergodic sum rate in nats, by both routes (index 0: closed form, index 1:
// kernel quadrature). The routes are cross-checked against each other and a
// ConsistencyError is thrown when they disagree beyond their error budgets.
std::vector<SumRateResult> zf_sumrate(const WeightFunctions& wf, double delta,
                                      const std::vector<double>& sigma_k);

// Kernel-route sum rate for a caller-supplied kernel (generic ensembles).
SumRateResult zf_sumrate_generic(const KernelHandle& kernel, double delta,
                                 const std::vector<double>& sigma_k);

// workers > 1 evaluates grid points on that many threads (evaluators are
// pure; results are identical to the serial order).
DensityCurve zf_density_curve(const WeightFunctions& wf, double delta,
                              double sigma_k, const GridSpec& grid,
                              bool use_generic_path = false, int workers = 1);

// ---- MMSE receiver ----

// Density of the per-stream MMSE output SINR. Gaussian products go through
// the binomial Meijer-G closed form wherever it keeps relative accuracy;
// small arguments (and truncated-unitary products generally) go through the
// weight-derivative integral, which near the origin amounts to the weight's
// analytic small-argument expansion.
double mmse_pdf(const WeightFunctions& wf, double delta, double gamma);

// The two specialized routes individually (both valid for any product
// ensemble with the stated restrictions; used for cross-validation).
double mmse_pdf_product_form(const WeightFunctions& wf, double delta,
                             double gamma);
double mmse_pdf_weight_form(const WeightFunctions& wf, double delta,
                            double gamma);

// Kernel-integral density route (ensemble-agnostic).
double mmse_pdf_generic(const KernelHandle& kernel, double delta,
                        double gamma, double tol = 1e-9);

// Ergodic sum rate in nats by both routes, cross-checked like zf_sumrate.
// Streams are exchangeable here (no correlation support on this receiver),
// so per_stream holds n_t equal entries.
std::vector<SumRateResult> mmse_sumrate(const WeightFunctions& wf, int n_t,
                                        double delta);

SumRateResult mmse_sumrate_generic(const KernelHandle& kernel, double delta);

// One term of the closed-form route: the contour integral
//   V_j = (1/2 pi i) Int_{Re r = 1/2} Gamma(1-r) (Gamma(r)/r) Momega(1+r)
//         P_j(r) delta^r dr,   P_j(r) = prod_{k in 0..n_t-1, k != j} (k - r).
// Exposed because the j >= 1 terms coincide with a binomial Meijer-G series
// whose j = 0 member is degenerate; this representation defines all terms.
double mmse_rate_contour_term(const WeightFunctions& wf, int n_t, int j,
                              double delta);

DensityCurve mmse_density_curve(const WeightFunctions& wf, double delta,
                                const GridSpec& grid, int workers = 1);

// ---- shared ----

// Monotone evaluation grid for a density curve: geometric spacing with both
// endpoints chosen from the density itself in auto mode — hi expands until
// the upper tail is negligible (unless the support is hard-bounded), and lo
// descends from hi*2e-3 toward a floor of hi*1e-8 until the origin-side
// contribution is negligible.
std::vector<double> density_grid(const std::function<double(double)>& pdf,
                                 double hi_hint, bool hard_upper_bound,
                                 const GridSpec& grid);

// L1 distance between two densities on (0, hi], by adaptive quadrature of
// the absolute difference (tolerance tol on the distance).
double density_l1_distance(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, double hi,
                           double tol = 1e-5);

}  // namespace sinrkit
