#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "sinrkit/analytics.hpp"
#include "sinrkit/errors.hpp"
#include "sinrkit/mellin_barnes.hpp"
#include "sinrkit/quadrature.hpp"
#include "sinrkit/special.hpp"

#include "parallel_util.hpp"

namespace sinrkit {

namespace {

constexpr double kSmallGamma = 1e-8;

void check_delta(double delta) {
  if (!(delta > 0.0)) throw ConfigError("receiver.delta: must be positive");
}

void require_product(const WeightFunctions& wf, const char* what) {
  if (!wf.spec().is_product()) {
    throw ConfigError(std::string("ensemble.kind: ") + what +
                      " needs a product ensemble; use the *_generic entry "
                      "point for kernel-specified ensembles");
  }
}

bool has_elementary_weight(const WeightFunctions& wf) {
  return wf.is_gaussian() && wf.spec().M == 1;
}

double weight_value(const WeightFunctions& wf, double x) {
  if (has_elementary_weight(wf)) {
    return std::pow(x, wf.spec().nu[0]) * std::exp(-x);
  }
  return wf.omega(x);
}

double weight_derivative_value(const WeightFunctions& wf, double x) {
  if (has_elementary_weight(wf)) {
    const int nu = wf.spec().nu[0];
    const double w = std::pow(x, nu) * std::exp(-x);
    return nu == 0 ? -w : (nu / x - 1.0) * w;
  }
  return wf.omega_derivative(x, 1);
}

}  // namespace

double mmse_pdf_product_form(const WeightFunctions& wf, double delta,
                             double gamma) {
  require_product(wf, "the binomial closed-form density");
  if (!wf.is_gaussian()) {
    throw ConfigError(
        "ensemble.kind: the binomial closed-form density applies to "
        "gaussian products; use mmse_pdf_weight_form instead");
  }
  check_delta(delta);
  if (!(gamma > 0.0)) return 0.0;

  const EnsembleSpec& spec = wf.spec();
  const int n_t = spec.n_t;
  const double beta = (gamma + n_t) / (gamma + 1.0);
  const double x = gamma / delta;

  double sum = 0.0;
  for (int j = 0; j < n_t; ++j) {
    MeijerGParams params;
    params.a = {-static_cast<double>(j), -beta};
    for (int n : spec.nu) params.c.push_back(static_cast<double>(n));
    params.d = {-1.0 - j, 1.0 - beta};

    MellinBarnesIntegrand mb = meijer_integrand(params);
    const auto [lmax, rmin] = mb.strip();
    if (!(lmax < rmin)) {
      throw InadmissibleParameters(
          "mmse density: no separating contour for the term ladder");
    }
    const double mid = 0.5 * (lmax + rmin);
    ContourResult cr = mb.evaluate_contour(mid, x, 1e-300, 1e-11);

    const double log_coeff = log_gamma(static_cast<double>(n_t)) -
                             log_gamma(static_cast<double>(j + 1)) -
                             log_gamma(static_cast<double>(n_t - j)) -
                             (j + 1) * std::log(delta) -
                             std::log(wf.mellin(j + 1.0));
    sum += cr.value * std::exp(log_coeff);
  }
  return std::pow(gamma / (gamma + 1.0), n_t - 1) * sum;
}

double mmse_pdf_weight_form(const WeightFunctions& wf, double delta,
                            double gamma) {
  require_product(wf, "the weight-derivative density");
  check_delta(delta);
  if (!(gamma > 0.0)) return 0.0;
  const EnsembleSpec& spec = wf.spec();
  const int n_t = spec.n_t;
  if (wf.is_jacobi() && gamma > delta) {
    // Bounded spectrum: the output SINR cannot exceed delta.
    return 0.0;
  }

  const double sign = (n_t % 2 == 0) ? -1.0 : 1.0;  // (-1)^(n_t + 1)
  const double front =
      sign * std::pow(gamma / (gamma + 1.0), n_t) /
      (delta * wf.mellin(static_cast<double>(n_t)));
  if (front == 0.0) return 0.0;  // gamma so small the prefactor underflows

  const Poly p_coeffs = poly_p_coefficients(wf, n_t - 1);
  const double c_gamma = 1.0 + static_cast<double>(n_t) / gamma;
  const double c_deriv = 1.0 + 1.0 / gamma;
  const auto integrand = [&](double u) {
    const double u_hat = gamma * u / delta;
    const double bracket = c_gamma * weight_value(wf, u_hat) +
                           c_deriv * u_hat * weight_derivative_value(wf, u_hat);
    return poly_eval(p_coeffs, -u / delta) * bracket;
  };

  // Two-stage evaluation keeps the integral relatively accurate however far
  // the density's scale sits below 1: a first pass with a loose absolute
  // floor discovers the magnitude, and a second pass rescales the floor to
  // it when the first stopped short of 1e-9 relative.
  QuadResult q = quad_adaptive(integrand, 0.0, 1.0, 1e-13, 1e-10, 48, false);
  if (!q.converged || q.error > 1e-9 * std::abs(q.value)) {
    const double tol2 = std::max(1e-300, 1e-11 * std::abs(q.value));
    QuadResult q2 = quad_adaptive(integrand, 0.0, 1.0, tol2, 1e-10, 48, false);
    if (q2.error < q.error) q = q2;
  }
  return front * q.value;
}

// Smallest argument x = gamma / delta at which the binomial contour form
// keeps ~1e-9 relative accuracy. Its term sum cancels down to the weight's
// leading origin power x^m (m = min nu), so double precision leaves a
// relative residue of roughly 1e-13 / x^m; below 10^(-4/m) that residue
// dominates. A weight with m = 0 has no such suppression.
double product_form_floor(const EnsembleSpec& spec) {
  const int m = spec.nu.empty()
                    ? 0
                    : *std::min_element(spec.nu.begin(), spec.nu.end());
  if (m == 0) return kSmallGamma;
  return std::pow(10.0, -4.0 / static_cast<double>(m));
}

double mmse_pdf(const WeightFunctions& wf, double delta, double gamma) {
  require_product(wf, "the product-ensemble density");
  check_delta(delta);
  if (!(gamma > 0.0)) return 0.0;
  // The binomial contour form loses relative accuracy once the density's
  // leading power gamma^(n_t - 1 + nu) underflows gradually. The
  // weight-derivative form instead feeds the weight's origin-convergent
  // expansion (its analytic small-argument series), which stays relatively
  // accurate down to the underflow floor, so small arguments route through
  // it for both ensemble kinds.
  const bool product_ok =
      wf.is_gaussian() && gamma >= kSmallGamma &&
      gamma / delta >= product_form_floor(wf.spec());
  return product_ok ? mmse_pdf_product_form(wf, delta, gamma)
                    : mmse_pdf_weight_form(wf, delta, gamma);
}

double mmse_pdf_generic(const KernelHandle& kernel, double delta,
                        double gamma, double tol) {
  check_delta(delta);
  if (!(gamma > 0.0)) return 0.0;
  const int n_t = kernel.n_t;
  if (std::isfinite(kernel.y_max) && gamma > delta * kernel.y_max) {
    return 0.0;
  }
  const double front =
      (n_t - 1) / delta * std::pow(gamma / (gamma + 1.0), n_t);
  const auto integrand = [&](double x) {
    return std::pow(1.0 - x, n_t - 2) * (x + 1.0 / gamma) *
           kernel.eval(-1.0 / delta, gamma * x / delta);
  };
  QuadResult q = quad_adaptive(integrand, 0.0, 1.0,
                               tol / std::max(front, 1.0), 1e-9);
  return front * q.value;
}

double mmse_rate_contour_term(const WeightFunctions& wf, int n_t, int j,
                              double delta) {
  require_product(wf, "the contour rate term");
  check_delta(delta);
  if (n_t < 2) throw ConfigError("ensemble.n_t: need at least 2 streams");
  if (j < 0 || j >= n_t) {
    throw ConfigError("receiver.term_index: j must lie in [0, n_t)");
  }
  const EnsembleSpec& spec = wf.spec();

  MellinBarnesIntegrand mb;
  mb.add_gamma(1.0, -1, +1);  // Gamma(1 - r)
  mb.add_gamma(0.0, +1, +1);  // Gamma(r)
  for (int n : spec.nu) mb.add_gamma(1.0 + n, +1, +1);
  if (spec.kind == EnsembleKind::kJacobiProduct) {
    for (int m : spec.mu) mb.add_gamma(1.0 + m, +1, -1);
  }
  std::vector<double> roots;
  for (int k = 0; k < n_t; ++k) {
    if (k != j) roots.push_back(static_cast<double>(k));
  }
  const double lead = (n_t % 2 == 0) ? -1.0 : 1.0;  // (-1)^(n_t - 1)
  mb.add_poly_numer(poly_from_roots(roots, lead));
  mb.add_poly_denom(poly_from_roots({0.0}, 1.0));  // the 1/r factor

  // The integrand has poles at r = 0 (double: Gamma(r)/r) and r = 1, 2, ...
  // from Gamma(1 - r); Re r = 1/2 separates them.
  ContourResult cr = mb.evaluate_contour(0.5, delta, 1e-300, 1e-11);
  return cr.value;
}

std::vector<SumRateResult> mmse_sumrate(const WeightFunctions& wf, int n_t,
                                        double delta) {
  require_product(wf, "the sum-rate cross-check");
  check_delta(delta);
  if (n_t != wf.spec().n_t) {
    throw ConfigError("ensemble.n_t: mismatch with the weight functions");
  }
  const bool jacobi = wf.is_jacobi();
  const double harmonic = harmonic_number(n_t - 1);

  // Closed form: R = n_t * (sum_j delta^-j / (j! (n_t-1-j)! Momega(j+1))
  //                          * V_j + H_{n_t-1}).
  double t_sum = 0.0;
  double t_err = 0.0;
  for (int j = 0; j < n_t; ++j) {
    const double vj = mmse_rate_contour_term(wf, n_t, j, delta);
    const double log_coeff = -j * std::log(delta) -
                             log_gamma(static_cast<double>(j + 1)) -
                             log_gamma(static_cast<double>(n_t - j)) -
                             std::log(wf.mellin(j + 1.0));
    const double coeff = std::exp(log_coeff);
    t_sum += coeff * vj;
    t_err += coeff * std::max(1e-13, 1e-11 * std::abs(vj));
  }
  SumRateResult closed;
  closed.method = kMethodClosedForm;
  closed.value_nats = n_t * (t_sum + harmonic);
  closed.per_stream.assign(n_t, t_sum + harmonic);
  closed.error_estimate = n_t * t_err;

  // Quadrature: R = n_t * (Int ln(1 + x delta) K(-1/delta, x) dx + H_{n_t-1})
  // over the spectral support.
  const auto integrand = [&](double x) {
    return std::log1p(x * delta) * kernel_K_sum(wf, n_t, -1.0 / delta, x);
  };
  QuadResult qr = jacobi
                      ? quad_adaptive(integrand, 0.0, 1.0, 1e-11, 1e-9)
                      : quad_to_infinity(integrand, 0.0, 1e-11, 1e-9);
  SumRateResult quad;
  quad.method = kMethodQuadrature;
  quad.value_nats = n_t * (qr.value + harmonic);
  quad.per_stream.assign(n_t, qr.value + harmonic);
  quad.error_estimate = n_t * qr.error;

  const double scale = std::max(1.0, std::abs(closed.value_nats));
  const double tol = std::max({1e-8, 1e-5 * scale,
                               50.0 * (closed.error_estimate +
                                       quad.error_estimate)});
  if (std::abs(closed.value_nats - quad.value_nats) > tol) {
    throw ConsistencyError(
        "mmse sum rate: closed form and quadrature disagree (" +
        std::to_string(closed.value_nats) + " vs " +
        std::to_string(quad.value_nats) + ")");
  }
  return {closed, quad};
}

SumRateResult mmse_sumrate_generic(const KernelHandle& kernel, double delta) {
  check_delta(delta);
  const int n_t = kernel.n_t;
  const double harmonic = harmonic_number(n_t - 1);
  const auto integrand = [&](double x) {
    return std::log1p(x * delta) * kernel.eval(-1.0 / delta, x);
  };
  const bool bounded = std::isfinite(kernel.y_max);
  QuadResult qr =
      bounded ? quad_adaptive(integrand, 0.0, kernel.y_max, 1e-11, 1e-9)
              : quad_to_infinity(integrand, 0.0, 1e-11, 1e-9);
  SumRateResult out;
  out.method = kMethodQuadrature;
  out.value_nats = n_t * (qr.value + harmonic);
  out.per_stream.assign(n_t, qr.value + harmonic);
  out.error_estimate = n_t * qr.error;
  return out;
}

double density_l1_distance(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, double hi,
                           double tol) {
  if (!(hi > 0.0)) throw ConfigError("grid: invalid upper bound");
  const auto diff = [&](double x) { return std::abs(f(x) - g(x)); };
  // |f - g| has kinks at sign changes; a modest relative target keeps the
  // adaptive refinement from chasing them below the requested tolerance.
  QuadResult q = quad_adaptive(diff, 0.0, hi, tol, 1e-4, 40);
  return q.value;
}

DensityCurve mmse_density_curve(const WeightFunctions& wf, double delta,
                                const GridSpec& grid, int workers) {
  require_product(wf, "the density curve");
  check_delta(delta);
  const bool jacobi = wf.is_jacobi();
  const auto pdf = [&](double g) { return mmse_pdf(wf, delta, g); };

  const double mean_scale = delta * wf.mellin(2.0) / wf.mellin(1.0);
  const double hi_hint = jacobi ? delta : std::max(6.0 * mean_scale, 8.0);
  const auto gammas = density_grid(pdf, hi_hint, jacobi, grid);

  DensityCurve curve;
  curve.receiver = Receiver::kMmse;
  curve.delta = delta;
  curve.sigma_k = 1.0;
  curve.method = wf.is_gaussian() ? kMethodClosedForm : kMethodQuadrature;
  const std::vector<double> values = internal::parallel_map_indexed(
      gammas.size(), workers, [&](std::size_t i) { return pdf(gammas[i]); });
  curve.points.reserve(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double rho = values[i];
    const double err = std::max(1e-13, 1e-9 * std::abs(rho));
    curve.points.push_back({gammas[i], rho, err});
  }
  return curve;
}

}  // namespace sinrkit
