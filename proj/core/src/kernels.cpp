#include "sinrkit/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sinrkit/errors.hpp"
#include "sinrkit/quadrature.hpp"
#include "sinrkit/special.hpp"

namespace sinrkit {

namespace {

// Error-free transformations (Knuth two-sum, FMA two-product).
inline double two_sum(double a, double b, double& err) {
  const double s = a + b;
  const double bb = s - a;
  err = (a - (s - bb)) + (b - bb);
  return s;
}

inline double two_prod(double a, double b, double& err) {
  const double p = a * b;
  err = std::fma(a, b, -p);
  return p;
}

// Full double-double Horner: the accumulator keeps a (hi, lo) mantissa pair,
// giving ~32 significant digits against alternating-term cancellation.
double horner_dd(const Poly& p, double x) {
  double hi = 0.0, lo = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    double perr;
    double ph = two_prod(hi, x, perr);
    double pl = std::fma(lo, x, perr);
    double serr;
    hi = two_sum(ph, *it, serr);
    lo = pl + serr;
    const double s = hi + lo;
    lo -= s - hi;
    hi = s;
  }
  return hi + lo;
}

}  // namespace

double poly_eval(const Poly& p, double x) {
  // Compensated Horner: plain recurrence plus an exactly-tracked correction
  // term, alongside the absolute-term magnitude that estimates cancellation.
  double acc = 0.0, corr = 0.0, mag = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    double perr;
    const double prod = two_prod(acc, x, perr);
    double serr;
    acc = two_sum(prod, *it, serr);
    corr = corr * x + (perr + serr);
    mag = mag * std::abs(x) + std::abs(*it);
  }
  const double value = acc + corr;
  const double eps = std::numeric_limits<double>::epsilon();
  // Relative error of the plain recurrence ~ eps * mag / |value|; past 1e-8
  // the compensated correction itself is at risk, so redo in double-double.
  if (std::abs(value) > 0.0 && eps * mag <= 1e-8 * std::abs(value)) {
    return value;
  }
  return horner_dd(p, x);
}

namespace {

// Scale factor 1 / (l! * M omega(l+1)), in log form for stability.
double log_q_scale(const WeightFunctions& wf, int l) {
  double log_mellin = 0.0;
  for (int n : wf.spec().nu) {
    log_mellin += log_gamma(static_cast<double>(l + 1 + n));
  }
  if (wf.is_jacobi()) {
    for (int m : wf.spec().mu) {
      log_mellin -= log_gamma(static_cast<double>(l + 1 + m));
    }
  }
  return -log_gamma(static_cast<double>(l + 1)) - log_mellin;
}

// M omega(hi) / M omega(lo) for integer arguments lo <= hi, formed as a
// product of small integer factors. Integer products below 2^53 are exact in
// doubles, so downstream alternating sums (biorthogonality, kernel sums)
// cancel exactly instead of leaving amplified exp/log rounding residue.
// Falls back to the log form if the factor products overflow.
double mellin_ratio(const WeightFunctions& wf, int lo, int hi) {
  if (lo > hi) return 1.0 / mellin_ratio(wf, hi, lo);
  double num = 1.0;
  double den = 1.0;
  for (int n : wf.spec().nu) {
    for (int i = lo; i < hi; ++i) num *= static_cast<double>(i + n);
  }
  if (wf.is_jacobi()) {
    for (int m : wf.spec().mu) {
      for (int i = lo; i < hi; ++i) den *= static_cast<double>(i + m);
    }
  }
  if (std::isfinite(num) && std::isfinite(den) && den != 0.0) {
    return num / den;
  }
  double lg = 0.0;
  for (int n : wf.spec().nu) {
    lg += log_gamma(static_cast<double>(hi + n)) -
          log_gamma(static_cast<double>(lo + n));
  }
  if (wf.is_jacobi()) {
    for (int m : wf.spec().mu) {
      lg -= log_gamma(static_cast<double>(hi + m)) -
            log_gamma(static_cast<double>(lo + m));
    }
  }
  return std::exp(lg);
}

// n! as a double; exact below 2^53 (n <= 18).
double factorial(int n) {
  double acc = 1.0;
  for (int i = 2; i <= n; ++i) acc *= static_cast<double>(i);
  return acc;
}

// Binomial coefficient by multiplicative recurrence; exact while < 2^53.
double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(acc);
}

// Inverse-Mellin integrand of the regular dual function q_l for a Gaussian
// product: F(s) = (-1)^l prod_{i=1..l}(s+i) * M omega(-s) / (l! M omega(l+1)).
MellinBarnesIntegrand q_integrand_gaussian(const WeightFunctions& wf, int l) {
  MellinBarnesIntegrand mb;
  for (int n : wf.spec().nu) {
    mb.add_gamma(static_cast<double>(n), -1, +1);
  }
  if (l > 0) {
    std::vector<double> roots(l);
    for (int i = 1; i <= l; ++i) roots[i - 1] = -static_cast<double>(i);
    mb.add_poly_numer(poly_from_roots(roots, l % 2 == 0 ? 1.0 : -1.0));
  }
  mb.add_log_prefactor(log_q_scale(wf, l));
  return mb;
}

// Jacobi dual function: regular part of
//   q_l = D^l[(-y)^l omega(y)] / (l! M omega(l+1))
// as an exact power-log series.
PolyLogSeries q_series_jacobi(const WeightFunctions& wf, int l) {
  const double scale =
      (l % 2 == 0 ? 1.0 : -1.0) * std::exp(log_q_scale(wf, l));
  return wf.series()->times_power(l).derivative(l).scaled(scale);
}

// Inverse-Mellin evaluation to relative accuracy. The dual functions are
// biorthogonal to low monomials, so their values sit many orders of
// magnitude below the leading residue terms; a fixed absolute tolerance
// would let the series truncate far above the true value. A first pass
// discovers the magnitude, a second pass re-evaluates with the absolute
// floor rescaled to it.
double eval_relative(const MellinBarnesIntegrand& mb, double y,
                     const std::string& ctx) {
  EvalDiagnostics d1;
  const double v1 =
      eval_inverse_mellin(mb, y, &d1, 1e-15, 1e-10, ctx, /*best_effort=*/true);
  if (d1.est_error <= 1e-10 * std::abs(v1)) return v1;
  const double tol2 = std::max(1e-300, 1e-12 * std::abs(v1));
  EvalDiagnostics d2;
  const double v2 =
      eval_inverse_mellin(mb, y, &d2, tol2, 1e-11, ctx, /*best_effort=*/true);
  return d2.est_error <= d1.est_error ? v2 : v1;
}

}  // namespace

Poly poly_p_coefficients(const WeightFunctions& wf, int l) {
  if (l < 0) {
    throw ConfigError("poly_p: degree must be >= 0");
  }
  // p_l(x) = sum_k C(l,k) (-1)^{l-k} [M omega(l+1) / M omega(k+1)] x^k.
  // The Mellin ratios are integer-factor products (rationals for truncated
  // unitaries), formed multiplicatively so small cases stay bit-exact.
  Poly coeffs(l + 1, 0.0);
  for (int k = 0; k <= l; ++k) {
    const double sign = (l - k) % 2 == 0 ? 1.0 : -1.0;
    coeffs[k] = sign * binom(l, k) * mellin_ratio(wf, k + 1, l + 1);
  }
  return coeffs;
}

double poly_p(const WeightFunctions& wf, int l, double x) {
  return poly_eval(poly_p_coefficients(wf, l), x);
}

std::vector<BoundaryTerm> weight_q_boundary(const WeightFunctions& wf,
                                            int l) {
  std::vector<BoundaryTerm> out;
  if (!wf.is_jacobi() || l < wf.boundary_threshold()) {
    return out;
  }
  // q_l = D^l[g Theta(1-y)] / (l! M omega(l+1)) with g = (-y)^l omega(y);
  // differentiating the cutoff produces derivatives of a point mass at 1:
  //   action extra = - sum_{k=0}^{l-1} g^{(k)}(1) (-1)^{l-1-k} psi^{(l-1-k)}(1)
  // scaled like the regular part.
  const double scale =
      (l % 2 == 0 ? 1.0 : -1.0) * std::exp(log_q_scale(wf, l));
  PolyLogSeries g = *wf.series();
  g = g.times_power(l);
  for (int k = 0; k <= l - 1; ++k) {
    const PolyLogSeries gk = g.derivative(k);
    const double gk1 = gk.value_at_1();
    if (gk1 != 0.0) {
      const int order = l - 1 - k;
      const double parity = order % 2 == 0 ? 1.0 : -1.0;
      out.push_back({order, -scale * gk1 * parity});
    }
  }
  return out;
}

double weight_q(const WeightFunctions& wf, int l, double y) {
  if (l < 0) {
    throw ConfigError("weight_q: index must be >= 0");
  }
  if (!(y >= 0.0)) {
    throw ConfigError("weight_q: argument must be >= 0");
  }
  if (wf.is_jacobi()) {
    if (y > 1.0) return 0.0;  // support ends at 1 (regular part)
    const PolyLogSeries q = q_series_jacobi(wf, l);
    if (y == 1.0) return q.value_at_1();
    if (y == 0.0) {
      // Limit at the origin: positive powers vanish, bare logs diverge.
      double acc = 0.0;
      for (const auto& t : q.terms()) {
        if (t.power == 0 && t.logpow > 0) {
          throw PrecisionLoss(
              "weight_q: logarithmically divergent at 0 for this parameter "
              "set");
        }
        if (t.power == 0) acc += t.coeff;
        if (t.power < 0) {
          throw PrecisionLoss("weight_q: divergent at 0");
        }
      }
      return acc;
    }
    return q.eval(y);
  }
  if (y == 0.0) {
    // Limit from the leading residue: zero unless some rectangularity is 0.
    int zeros = 0;
    for (int n : wf.spec().nu) {
      if (n == 0) ++zeros;
    }
    if (zeros == 0) return 0.0;
    if (zeros > 1) {
      throw PrecisionLoss(
          "weight_q: logarithmically divergent at 0 for repeated zero "
          "rectangularities");
    }
    // The constant term of the expansion; evaluating just off the origin
    // reads it to full precision since every other term carries a power of y.
    MellinBarnesIntegrand mb = q_integrand_gaussian(wf, l);
    return eval_relative(mb, 1e-13, "for q at the origin");
  }
  MellinBarnesIntegrand mb = q_integrand_gaussian(wf, l);
  return eval_relative(mb, y, "for the dual function q_" + std::to_string(l));
}

double weight_q_apply_poly(const WeightFunctions& wf, int l,
                           const Poly& psi) {
  if (wf.is_gaussian()) {
    // Moments are exact: Integral y^m q_l dy
    //   = m (m-1) ... (m-l+1) * M omega(m+1) / (l! M omega(l+1)).
    // The Mellin ratio is accumulated factor-exactly and the division by l!
    // happens once at the end, so alternating polynomial actions (for
    // example biorthogonality sums) cancel without rounding residue.
    double acc = 0.0;
    for (std::size_t m = 0; m < psi.size(); ++m) {
      if (psi[m] == 0.0) continue;
      double falling = 1.0;
      for (int i = 0; i < l; ++i) {
        falling *= static_cast<double>(m) - static_cast<double>(i);
      }
      if (falling == 0.0) continue;
      acc += psi[m] * falling *
             mellin_ratio(wf, l + 1, static_cast<int>(m) + 1);
    }
    return acc / factorial(l);
  }
  // Jacobi: exact moments of the regular power-log series plus the boundary
  // action. Integral_0^1 x^{N+m} ln^k x dx = (-1)^k k! / (N+m+1)^{k+1}.
  const PolyLogSeries reg = q_series_jacobi(wf, l);
  double acc = 0.0;
  for (std::size_t m = 0; m < psi.size(); ++m) {
    if (psi[m] == 0.0) continue;
    double moment = 0.0;
    for (const auto& t : reg.terms()) {
      const double np1 = static_cast<double>(t.power) + m + 1.0;
      double piece = t.coeff / np1;
      for (int k = 1; k <= t.logpow; ++k) {
        piece *= -static_cast<double>(k) / np1;
      }
      moment += piece;
    }
    acc += psi[m] * moment;
  }
  for (const auto& bt : weight_q_boundary(wf, l)) {
    // d-th derivative of psi at 1.
    double deriv = 0.0;
    for (std::size_t m = static_cast<std::size_t>(bt.derivative_order);
         m < psi.size(); ++m) {
      double falling = 1.0;
      for (int i = 0; i < bt.derivative_order; ++i) {
        falling *= static_cast<double>(m) - static_cast<double>(i);
      }
      deriv += psi[m] * falling;
    }
    acc += bt.coeff * deriv;
  }
  return acc;
}

double kernel_K(const WeightFunctions& wf, int n_t, double x, double y,
                double tol) {
  if (n_t < 2) {
    throw ConfigError("kernel_K: order must be >= 2");
  }
  if (!(y > 0.0)) {
    throw ConfigError("kernel_K: second argument must be positive");
  }
  const double front =
      -static_cast<double>(n_t) * wf.mellin(n_t + 1.0) / wf.mellin(n_t);
  const Poly p = poly_p_coefficients(wf, n_t - 1);

  double u_hi = 1.0;
  if (wf.is_jacobi() && y > 1.0) {
    u_hi = 1.0 / y;
  }

  if (wf.is_jacobi()) {
    const PolyLogSeries q = q_series_jacobi(wf, n_t);
    auto f = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double yu = y * u;
      const double qv = yu >= 1.0 ? 0.0 : q.eval(yu);
      return poly_eval(p, x * u) * qv;
    };
    return front * quad_adaptive(f, 0.0, u_hi, tol, tol).value;
  }
  MellinBarnesIntegrand mb = q_integrand_gaussian(wf, n_t);
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    return poly_eval(p, x * u) *
           eval_relative(mb, y * u, "inside the kernel integral");
  };
  return front * quad_adaptive(f, 0.0, u_hi, tol, tol).value;
}

double kernel_K_sum(const WeightFunctions& wf, int n_t, double x, double y) {
  double acc = 0.0;
  for (int j = 0; j < n_t; ++j) {
    acc += poly_p(wf, j, x) * weight_q(wf, j, y);
  }
  return acc;
}

double kernel_K0(const WeightFunctions& wf, int n_t, double y) {
  if (n_t < 2) {
    throw ConfigError("kernel_K0: order must be >= 2");
  }
  if (!(y > 0.0)) {
    throw ConfigError("kernel_K0: argument must be positive");
  }
  const double log_scale = -log_gamma(static_cast<double>(n_t)) -
                           std::log(wf.mellin(1.0));
  if (wf.is_jacobi()) {
    if (y > 1.0) return 0.0;
    // (1/y) D^{n_t-1}[y^{n_t} omega(y)], symbolically on the series.
    const PolyLogSeries k0 = wf.series()
                                 ->times_power(n_t)
                                 .derivative(n_t - 1)
                                 .times_power(-1)
                                 .scaled(std::exp(log_scale));
    return k0.eval(y);
  }
  // Single inverse-Mellin integral:
  //   F(s) = prod_{i=2..n_t}(s+i) * M omega(-s) / ((n_t-1)! M omega(1)).
  MellinBarnesIntegrand mb;
  for (int n : wf.spec().nu) {
    mb.add_gamma(static_cast<double>(n), -1, +1);
  }
  std::vector<double> roots(n_t - 1);
  for (int i = 2; i <= n_t; ++i) roots[i - 2] = -static_cast<double>(i);
  mb.add_poly_numer(poly_from_roots(roots, 1.0));
  mb.add_log_prefactor(log_scale);
  return eval_relative(mb, y, "for the kernel at zero");
}

KernelHandle make_kernel_handle(std::shared_ptr<const WeightFunctions> wf,
                                int n_t) {
  KernelHandle h;
  h.n_t = n_t;
  h.x_min = -std::numeric_limits<double>::infinity();
  h.x_max = std::numeric_limits<double>::infinity();
  h.y_min = 0.0;
  h.y_max = wf->is_jacobi() ? 1.0 : std::numeric_limits<double>::infinity();
  const int threshold = wf->boundary_threshold();
  if (wf->is_jacobi() && threshold < n_t + 1) {
    h.notes =
        "regular part only: the dual functions carry point-mass terms at "
        "y = 1 for this parameter set";
  }
  h.eval = [wf, n_t](double x, double y) {
    return kernel_K_sum(*wf, n_t, x, y);
  };
  h.eval_at_zero = [wf, n_t](double y) { return kernel_K0(*wf, n_t, y); };
  return h;
}

KernelHandle make_kernel_handle(const EnsembleSpec& spec) {
  if (spec.kind != EnsembleKind::kGenericKernel) {
    throw ConfigError(
        "make_kernel_handle: this overload is for generic_kernel ensembles");
  }
  validate(spec);
  KernelHandle h;
  h.n_t = spec.n_t;
  h.x_min = -std::numeric_limits<double>::infinity();
  h.x_max = std::numeric_limits<double>::infinity();
  h.y_min = 0.0;
  h.y_max = std::numeric_limits<double>::infinity();
  if (spec.generic_kernel) {
    h.notes = "caller-supplied kernel; validity is the caller's contract";
    auto k = spec.generic_kernel;
    h.eval = k;
    h.eval_at_zero = [k](double y) { return k(0.0, y); };
    return h;
  }
  // Tabulated sections: K(0, .) always, K(shift_x, .) when provided. The
  // two-argument evaluator dispatches on x and rejects values away from the
  // tabulated sections.
  h.y_max = spec.kernel_table_at_zero.y.back();
  h.notes = "tabulated kernel sections (cubic interpolation); 0 outside the "
            "tabulated grid";
  auto zero_table = spec.kernel_table_at_zero;
  auto shift_table = spec.kernel_table_at_shift;
  const double shift_x = spec.kernel_shift_x;
  h.eval_at_zero = [zero_table](double y) {
    return interpolate_cubic(zero_table, y);
  };
  h.eval = [zero_table, shift_table, shift_x](double x, double y) {
    if (x == 0.0) return interpolate_cubic(zero_table, y);
    if (!shift_table.empty() &&
        std::abs(x - shift_x) <= 1e-12 * std::max(1.0, std::abs(shift_x))) {
      return interpolate_cubic(shift_table, y);
    }
    throw ConfigError(
        "generic kernel: x = " + std::to_string(x) +
        " is outside the tabulated sections (0 and " +
        std::to_string(shift_x) + ")");
  };
  return h;
}

}  // namespace sinrkit
