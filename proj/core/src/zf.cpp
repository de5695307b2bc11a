#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <utility>

#include "sinrkit/analytics.hpp"
#include "sinrkit/errors.hpp"
#include "sinrkit/mellin_barnes.hpp"
#include "sinrkit/quadrature.hpp"
#include "sinrkit/special.hpp"

#include "parallel_util.hpp"

namespace sinrkit {

namespace {

void check_scale_args(double delta, double sigma_k) {
  if (!(delta > 0.0)) {
    throw ConfigError("receiver.delta: must be positive");
  }
  if (!(sigma_k > 0.0)) {
    throw ConfigError("correlation.sigma_k: must be positive");
  }
}

// Single-factor Gaussian weights are elementary: omega(x) = x^nu exp(-x).
bool has_elementary_weight(const WeightFunctions& wf) {
  return wf.is_gaussian() && wf.spec().M == 1;
}

double elementary_gaussian_weight(int nu, double x) {
  return std::pow(x, nu) * std::exp(-x);
}

// Per-stream rate from the closed form: for a product ensemble with weight
// transform Momega,
//   R_k = (1 / Momega(1)) * G(a = {-nu_1..-nu_M, 1, 1}; b = {};
//                              c = {1}; d = {-mu_1..-mu_M (if any), 0}
//                              | delta / sigma_k).
double zf_rate_closed_one(const WeightFunctions& wf, double z,
                          double* err_out) {
  const EnsembleSpec& spec = wf.spec();
  MeijerGParams params;
  for (int n : spec.nu) params.a.push_back(-static_cast<double>(n));
  params.a.push_back(1.0);
  params.a.push_back(1.0);
  params.c.push_back(1.0);
  if (spec.kind == EnsembleKind::kJacobiProduct) {
    for (int m : spec.mu) params.d.push_back(-static_cast<double>(m));
  }
  params.d.push_back(0.0);

  EvalDiagnostics diag;
  const double g =
      meijer_g(params, z, &diag, 1e-11, 1e-9);
  if (err_out != nullptr) *err_out = diag.est_error;
  return g / wf.mellin(1.0);
}

// Integrand weight under the quadrature route, with the elementary bypass.
double weight_value(const WeightFunctions& wf, double x) {
  if (has_elementary_weight(wf)) {
    return elementary_gaussian_weight(wf.spec().nu[0], x);
  }
  return wf.omega(x);
}

struct StreamGroup {
  double sigma = 1.0;
  std::vector<std::size_t> indices;
};

std::vector<StreamGroup> group_streams(const std::vector<double>& sigma_k) {
  std::map<double, std::vector<std::size_t>> by_sigma;
  for (std::size_t k = 0; k < sigma_k.size(); ++k) {
    by_sigma[sigma_k[k]].push_back(k);
  }
  std::vector<StreamGroup> groups;
  groups.reserve(by_sigma.size());
  for (auto& [sigma, idx] : by_sigma) {
    groups.push_back({sigma, std::move(idx)});
  }
  return groups;
}

void validate_sigma_list(const EnsembleSpec& spec,
                         const std::vector<double>& sigma_k) {
  if (sigma_k.size() != static_cast<std::size_t>(spec.n_t)) {
    throw ConfigError("correlation.sigma_k: expected one entry per stream (" +
                      std::to_string(spec.n_t) + ")");
  }
  for (double s : sigma_k) {
    if (!(s > 0.0)) {
      throw ConfigError("correlation.sigma_k: entries must be positive");
    }
  }
}

}  // namespace

double zf_pdf_specialized(const WeightFunctions& wf, double delta,
                          double sigma_k, double gamma) {
  check_scale_args(delta, sigma_k);
  if (!(gamma > 0.0)) return 0.0;
  const double x = sigma_k * gamma / delta;
  return sigma_k / (delta * wf.mellin(1.0)) * weight_value(wf, x);
}

double zf_pdf_generic(const KernelHandle& kernel, double delta,
                      double sigma_k, double gamma, double tol) {
  check_scale_args(delta, sigma_k);
  if (!(gamma > 0.0)) return 0.0;
  const int n_t = kernel.n_t;
  const double y_top = sigma_k * gamma / delta;
  if (std::isfinite(kernel.y_max) && y_top >= kernel.y_max) {
    // Bounded spectrum: the SINR cannot exceed delta * y_max / sigma_k.
    return 0.0;
  }
  const double front = (n_t - 1) * sigma_k / delta;
  const auto integrand = [&](double x) {
    return kernel.eval_at_zero(y_top * x) * std::pow(1.0 - x, n_t - 2) * x;
  };
  QuadResult q = quad_adaptive(integrand, 0.0, 1.0,
                               tol / std::max(front, 1.0), 1e-9);
  return front * q.value;
}

std::vector<SumRateResult> zf_sumrate(const WeightFunctions& wf, double delta,
                                      const std::vector<double>& sigma_k) {
  const EnsembleSpec& spec = wf.spec();
  if (!spec.is_product()) {
    throw ConfigError(
        "ensemble.kind: closed-form sum rates need a product ensemble; use "
        "zf_sumrate_generic for kernel-specified ensembles");
  }
  if (!(delta > 0.0)) throw ConfigError("receiver.delta: must be positive");
  validate_sigma_list(spec, sigma_k);
  const auto groups = group_streams(sigma_k);
  const std::size_t n_streams = sigma_k.size();

  SumRateResult closed;
  closed.method = kMethodClosedForm;
  closed.per_stream.assign(n_streams, 0.0);

  SumRateResult quad;
  quad.method = kMethodQuadrature;
  quad.per_stream.assign(n_streams, 0.0);

  const double mellin1 = wf.mellin(1.0);
  const bool jacobi = spec.kind == EnsembleKind::kJacobiProduct;

  for (const auto& group : groups) {
    const double z = delta / group.sigma;

    double g_err = 0.0;
    const double rate_closed = zf_rate_closed_one(wf, z, &g_err);

    // Quadrature route:  R_k = (1 / Momega(1)) Int omega(x) ln(1 + z x) dx
    // over the weight's support.
    const auto integrand = [&](double x) {
      return weight_value(wf, x) * std::log1p(z * x);
    };
    QuadResult qr = jacobi
                        ? quad_adaptive(integrand, 0.0, 1.0, 1e-11, 1e-9)
                        : quad_to_infinity(integrand, 0.0, 1e-11, 1e-9);
    const double rate_quad = qr.value / mellin1;
    const double quad_err = qr.error / mellin1;

    for (std::size_t k : group.indices) {
      closed.per_stream[k] = rate_closed;
      quad.per_stream[k] = rate_quad;
    }
    closed.value_nats += rate_closed * static_cast<double>(group.indices.size());
    quad.value_nats += rate_quad * static_cast<double>(group.indices.size());
    closed.error_estimate += g_err / mellin1 * group.indices.size();
    quad.error_estimate += quad_err * group.indices.size();

    const double scale = std::max({1.0, std::abs(rate_closed)});
    const double tol = std::max(
        {1e-8, 1e-5 * scale,
         50.0 * (g_err / mellin1 + quad_err)});
    if (std::abs(rate_closed - rate_quad) > tol) {
      throw ConsistencyError(
          "zero-forcing sum rate: closed form and quadrature disagree (" +
          std::to_string(rate_closed) + " vs " + std::to_string(rate_quad) +
          " at delta/sigma = " + std::to_string(z) + ")");
    }
  }
  return {closed, quad};
}

SumRateResult zf_sumrate_generic(const KernelHandle& kernel, double delta,
                                 const std::vector<double>& sigma_k) {
  if (!(delta > 0.0)) throw ConfigError("receiver.delta: must be positive");
  if (sigma_k.size() != static_cast<std::size_t>(kernel.n_t)) {
    throw ConfigError("correlation.sigma_k: expected one entry per stream (" +
                      std::to_string(kernel.n_t) + ")");
  }
  const int n_t = kernel.n_t;
  const auto groups = group_streams(sigma_k);

  SumRateResult out;
  out.method = kMethodQuadrature;
  out.per_stream.assign(sigma_k.size(), 0.0);

  // log(1 + z x) expressed through the rank-two G block used by the
  // kernel-route rate integral; precomputed per stream group at each node.
  MeijerGParams log_params;
  log_params.a = {1.0, 1.0};
  log_params.b = {static_cast<double>(n_t)};
  log_params.c = {1.0, 1.0};
  log_params.d = {0.0};

  const double front = std::exp(log_gamma(static_cast<double>(n_t)));
  const bool bounded = std::isfinite(kernel.y_max);
  const double upper = bounded ? kernel.y_max : 0.0;

  double total_err = 0.0;
  std::vector<double> group_rates(groups.size(), 0.0);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double z = delta / groups[gi].sigma;
    const auto integrand = [&](double x) {
      EvalDiagnostics diag;
      const double g = meijer_g(log_params, z * x, &diag, 1e-11, 1e-9);
      return kernel.eval_at_zero(x) * g;
    };
    QuadResult qr = bounded
                        ? quad_adaptive(integrand, 0.0, upper, 1e-11, 1e-9)
                        : quad_to_infinity(integrand, 0.0, 1e-11, 1e-9);
    group_rates[gi] = front * qr.value;
    total_err += front * qr.error * groups[gi].indices.size();
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t k : groups[gi].indices) {
      out.per_stream[k] = group_rates[gi];
      out.value_nats += group_rates[gi];
    }
  }
  out.error_estimate = total_err;
  return out;
}

std::vector<double> density_grid(const std::function<double(double)>& pdf,
                                 double hi_hint, bool hard_upper_bound,
                                 const GridSpec& grid) {
  int n = grid.points;
  if (n < 2) throw ConfigError("grid.points: need at least 2");
  double lo = 0.0;
  double hi = 0.0;
  if (!grid.auto_grid) {
    lo = grid.lo;
    hi = grid.hi;
    if (!(lo > 0.0) || !(hi > lo)) {
      throw ConfigError("grid: require 0 < lo < hi for an explicit grid");
    }
  } else {
    hi = hi_hint;
    if (!(hi > 0.0)) throw ConfigError("grid: invalid upper hint");
    // Bulk scale of gamma * rho(gamma), used to judge both tails.
    double scale = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double g = hi_hint * std::pow(0.5, k);
      scale = std::max(scale, g * pdf(g));
    }
    scale = std::max(scale, 1e-300);
    if (!hard_upper_bound) {
      // Expand until the tail contribution gamma * rho(gamma) is negligible
      // against the bulk scale of the same quantity.
      int guard = 0;
      while (guard++ < 120 && hi * pdf(hi) > 1e-10 * scale) {
        hi *= 1.35;
      }
    }
    // Start the grid where the origin-side contribution is already
    // negligible: densities that vanish fast at zero get a short left tail,
    // while flat ones are followed down to hi * 1e-8.
    lo = hi * 2e-3;
    int guard = 0;
    while (guard++ < 40 && lo > hi * 1.0000001e-8 &&
           lo * pdf(lo) > 1e-9 * scale) {
      lo = std::max(lo * 0.3, hi * 1e-8);
    }
  }
  std::vector<double> gammas(n);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) {
    gammas[i] = lo * std::exp(ratio * i / (n - 1));
  }
  gammas.back() = hi;
  return gammas;
}

DensityCurve zf_density_curve(const WeightFunctions& wf, double delta,
                              double sigma_k, const GridSpec& grid,
                              bool use_generic_path, int workers) {
  check_scale_args(delta, sigma_k);
  const EnsembleSpec& spec = wf.spec();
  const bool jacobi = spec.kind == EnsembleKind::kJacobiProduct;

  std::shared_ptr<const WeightFunctions> wf_shared;
  KernelHandle handle;
  if (use_generic_path) {
    wf_shared = std::make_shared<WeightFunctions>(wf.spec());
    handle = make_kernel_handle(wf_shared, spec.n_t);
  }
  const auto pdf = [&](double g) {
    return use_generic_path
               ? zf_pdf_generic(handle, delta, sigma_k, g)
               : zf_pdf_specialized(wf, delta, sigma_k, g);
  };

  // Mean of the specialized density is (delta/sigma) Momega(2)/Momega(1).
  const double mean = delta / sigma_k * wf.mellin(2.0) / wf.mellin(1.0);
  const double hi_hint = jacobi ? delta / sigma_k : std::max(4.0 * mean, 8.0);
  const auto gammas = density_grid(pdf, hi_hint, jacobi, grid);

  DensityCurve curve;
  curve.receiver = Receiver::kZf;
  curve.delta = delta;
  curve.sigma_k = sigma_k;
  curve.method = use_generic_path ? kMethodQuadrature : kMethodClosedForm;
  const std::vector<double> values = internal::parallel_map_indexed(
      gammas.size(), workers, [&](std::size_t i) { return pdf(gammas[i]); });
  curve.points.reserve(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double rho = values[i];
    const double err =
        use_generic_path ? 1e-9 : std::max(1e-13, 1e-10 * std::abs(rho));
    curve.points.push_back({gammas[i], rho, err});
  }
  return curve;
}

}  // namespace sinrkit
