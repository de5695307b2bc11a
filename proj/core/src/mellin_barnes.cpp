#include "sinrkit/mellin_barnes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "sinrkit/errors.hpp"
#include "sinrkit/special.hpp"

namespace sinrkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::complex<double> eval_poly(const Poly& p, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    acc = acc * s + *it;
  }
  return acc;
}

// Canonical fractional part on a 1e-9 grid, for grouping pole families that
// live on the same integer-offset lattice.
long frac_key(double x) {
  double f = x - std::floor(x);
  long key = std::lround(f * 1e9);
  if (key == 1000000000L) key = 0;
  return key;
}

struct PolePoint {
  double position;
  int multiplicity;
};

// Walk one congruence class of a one-sided pole family. "starts" are the
// first poles of numerator gamma factors, "zero_starts" the first zeros of
// denominator factors; both extend in the same direction (step +1 for right
// families on the s axis after mirroring, -1 handled by the caller through
// mirroring). Returns surviving poles with multiplicities, positions <= p_max.
std::vector<PolePoint> walk_class(std::vector<double> starts,
                                  std::vector<double> zero_starts,
                                  double p_max) {
  std::vector<PolePoint> out;
  if (starts.empty()) return out;
  std::sort(starts.begin(), starts.end());
  std::sort(zero_starts.begin(), zero_starts.end());
  const double eps = 1e-7;
  for (double p = starts.front(); p <= p_max + eps; p += 1.0) {
    int mult = 0;
    for (double a : starts) {
      if (a <= p + eps) ++mult;
    }
    for (double b : zero_starts) {
      if (b <= p + eps) --mult;
    }
    if (mult > 0) {
      out.push_back({p, mult});
    }
    // Once past every start the multiplicity is constant; bail out early when
    // it is non-positive (the family has terminated).
    if (p > starts.back() + eps &&
        (zero_starts.empty() || p > zero_starts.back() + eps) && mult <= 0) {
      break;
    }
  }
  return out;
}

}  // namespace

Poly poly_from_roots(const std::vector<double>& roots, double scale) {
  Poly p{scale};
  for (double r : roots) {
    Poly next(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j] -= p[j] * r;
      next[j + 1] += p[j];
    }
    p = std::move(next);
  }
  return p;
}

std::complex<double> MellinBarnesIntegrand::log_integrand(
    std::complex<double> s) const {
  std::complex<double> acc(log_prefactor_, 0.0);
  for (const auto& g : gammas_) {
    const std::complex<double> arg =
        g.sign_s > 0 ? g.alpha + s : g.alpha - s;
    const std::complex<double> lg = log_gamma(arg);
    acc += g.sign_term > 0 ? lg : -lg;
  }
  for (const auto& p : numer_polys_) {
    acc += std::log(eval_poly(p, s));
  }
  for (const auto& q : denom_polys_) {
    acc -= std::log(eval_poly(q, s));
  }
  return acc;
}

std::complex<double> MellinBarnesIntegrand::integrand(
    std::complex<double> s) const {
  return std::exp(log_integrand(s));
}

double MellinBarnesIntegrand::decay_rate() const {
  int net = 0;
  for (const auto& g : gammas_) net += g.sign_term;
  return 0.5 * kPi * net;
}

int MellinBarnesIntegrand::right_closure_growth() const {
  int net = 0;
  for (const auto& g : gammas_) net += g.sign_s * g.sign_term;
  return net;
}

std::pair<double, double> MellinBarnesIntegrand::strip() const {
  // Right family: Gamma(alpha - s) poles march up from alpha.
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> right;
  // Left family on the mirrored axis u = -s: Gamma(alpha + s) poles at
  // s = -alpha - k become u = alpha + k, marching up.
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> left;
  for (const auto& g : gammas_) {
    auto& groups = g.sign_s < 0 ? right : left;
    auto& cls = groups[frac_key(g.alpha)];
    (g.sign_term > 0 ? cls.first : cls.second).push_back(g.alpha);
  }

  double right_min = kInf;
  for (auto& [key, cls] : right) {
    double bound = 0.0;
    for (double a : cls.first) bound = std::max(bound, std::abs(a));
    for (double b : cls.second) bound = std::max(bound, std::abs(b));
    auto poles = walk_class(cls.first, cls.second, bound + 2.0);
    if (!poles.empty()) {
      right_min = std::min(right_min, poles.front().position);
    }
  }
  double left_max = -kInf;
  for (auto& [key, cls] : left) {
    double bound = 0.0;
    for (double a : cls.first) bound = std::max(bound, std::abs(a));
    for (double b : cls.second) bound = std::max(bound, std::abs(b));
    auto poles = walk_class(cls.first, cls.second, bound + 2.0);
    if (!poles.empty()) {
      // First surviving pole at u = p means s = -p.
      left_max = std::max(left_max, -poles.front().position);
    }
  }
  return {left_max, right_min};
}

ContourResult MellinBarnesIntegrand::evaluate_contour(double c, double x,
                                                      double tol_abs,
                                                      double tol_rel) const {
  if (!(x > 0.0)) {
    throw ConfigError("evaluate_contour: argument x must be positive");
  }
  const double lnx = std::log(x);

  auto lam = [&](double t) {
    const std::complex<double> s(c, t);
    return log_integrand(s) + s * lnx;
  };

  const std::complex<double> lam0 = lam(0.0);
  if (!std::isfinite(lam0.real()) || !std::isfinite(lam0.imag())) {
    throw InadmissibleParameters(
        "evaluate_contour: integrand singular on the contour at t = 0");
  }
  const double shift = lam0.real();

  ContourResult out;
  if (shift < -740.0) {
    // The whole integrand underflows; the value is zero at double precision.
    out.value = 0.0;
    out.error = tol_abs;
    out.nodes = 1;
    return out;
  }

  // Initial spacing: finer when the phase s*ln x or a crowded gamma list
  // makes the integrand wiggle faster.
  const double h0 =
      0.25 / (1.0 + std::abs(lnx) / 8.0 +
              static_cast<double>(gammas_.size()) / 10.0);

  // Scan at h0 to find the truncation point from the modulus envelope.
  double peak = 1.0;
  double sum = 0.5 * std::exp(lam0 - shift).real();
  long nodes = 1;
  long k = 1;
  int quiet = 0;
  double t_max = 0.0;
  while (true) {
    const double t = static_cast<double>(k) * h0;
    const std::complex<double> l = lam(t);
    const double modulus = std::exp(l.real() - shift);
    peak = std::max(peak, modulus);
    sum += std::exp(l - shift).real();
    ++nodes;
    if (modulus < 1e-18 * peak) {
      if (++quiet >= 6) {
        t_max = t;
        break;
      }
    } else {
      quiet = 0;
    }
    ++k;
    if (k > 4'000'000L) {
      throw PrecisionLoss(
          "evaluate_contour: integrand failed to decay along the contour");
    }
  }

  double h = h0;
  double trapezoid = h * sum;
  double prev = trapezoid;
  double err = std::abs(trapezoid);
  // Roundoff floor of the shifted trapezoid sums: once the level-to-level
  // difference reaches it, further halving only resamples noise — stop there
  // even if the requested tolerance is finer (it is unreachable in doubles,
  // e.g. when heavy cancellation puts the value far below the peak modulus).
  const double floor_shifted = 1e-16 * peak * std::max(1.0, t_max);
  for (int level = 0; level < 14; ++level) {
    h *= 0.5;
    double odd_sum = 0.0;
    for (double t = h; t <= t_max; t += 2.0 * h) {
      odd_sum += std::exp(lam(t) - shift).real();
      ++nodes;
    }
    trapezoid = 0.5 * prev + h * odd_sum;
    err = std::abs(trapezoid - prev);
    const double scale = std::exp(shift) / kPi;
    if (err * scale <=
            std::max(tol_abs, tol_rel * std::abs(trapezoid) * scale) ||
        err <= floor_shifted) {
      prev = trapezoid;
      break;
    }
    prev = trapezoid;
  }

  const double scale = std::exp(shift) / kPi;
  out.value = prev * scale;
  out.error = (err + 1e-15 * std::abs(prev) + 1e-17 * peak) * scale;
  out.nodes = nodes;
  return out;
}

namespace {

// All surviving right-family poles of the gamma factors with positions up to
// p_max, sorted ascending. Polynomial factors are not consulted here; a
// numerator root sitting exactly on a pole simply produces a zero residue in
// the circle quadrature.
std::vector<PolePoint> right_poles(const std::vector<GammaTerm>& gammas,
                                   double p_max) {
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> classes;
  for (const auto& g : gammas) {
    if (g.sign_s < 0) {
      auto& cls = classes[frac_key(g.alpha)];
      (g.sign_term > 0 ? cls.first : cls.second).push_back(g.alpha);
    }
  }
  std::vector<PolePoint> all;
  for (auto& [key, cls] : classes) {
    auto poles = walk_class(cls.first, cls.second, p_max);
    all.insert(all.end(), poles.begin(), poles.end());
  }
  std::sort(all.begin(), all.end(),
            [](const PolePoint& a, const PolePoint& b) {
              return a.position < b.position;
            });
  return all;
}

// True when every right-family congruence class cancels out eventually, so
// the pole set (and hence the residue series) is finite.
bool right_family_terminates(const std::vector<GammaTerm>& gammas) {
  std::map<long, int> excess;
  bool any = false;
  for (const auto& g : gammas) {
    if (g.sign_s < 0) {
      excess[frac_key(g.alpha)] += g.sign_term;
      if (g.sign_term > 0) any = true;
    }
  }
  if (!any) return true;
  for (const auto& [key, e] : excess) {
    if (e > 0) return false;
  }
  return true;
}

// Saddle-point contour placement: minimize the magnitude of F(s) x^s along
// the admissible real interval. The probe sits half a unit off the real
// axis so polynomial zeros and cancelled pole points do not masquerade as
// minima; the chosen abscissa is then nudged off any exact real-axis zero.
double pick_contour(const MellinBarnesIntegrand& mb, double x,
                    double left_max, double right_min) {
  const double lnx = std::log(x);
  const double inf = std::numeric_limits<double>::infinity();
  auto score = [&](double c) -> double {
    try {
      const double r =
          mb.log_integrand(std::complex<double>(c, 0.5)).real() + c * lnx;
      return std::isfinite(r) ? r : inf;
    } catch (const NumericalError&) {
      return inf;
    }
  };
  auto on_axis_ok = [&](double c) -> bool {
    try {
      const double r =
          mb.log_integrand(std::complex<double>(c, 0.0)).real() + c * lnx;
      return std::isfinite(r);
    } catch (const NumericalError&) {
      return false;
    }
  };

  double lo, hi;
  std::vector<double> candidates;
  if (std::isfinite(left_max) && std::isfinite(right_min)) {
    const double width = right_min - left_max;
    lo = left_max + 0.02 * width;
    hi = right_min - 0.02 * width;
    for (int i = 0; i <= 48; ++i) {
      candidates.push_back(lo + (hi - lo) * i / 48.0);
    }
  } else if (std::isfinite(right_min)) {
    hi = right_min - 0.05;
    candidates.push_back(hi);
    double step = 0.25;
    double c = hi;
    for (int i = 0; i < 64 && c > -1e9; ++i) {
      c -= step;
      step *= 1.5;
      candidates.push_back(c);
    }
    lo = candidates.back();
  } else if (std::isfinite(left_max)) {
    lo = left_max + 0.05;
    candidates.push_back(lo);
    double step = 0.25;
    double c = lo;
    for (int i = 0; i < 64 && c < 1e9; ++i) {
      c += step;
      step *= 1.5;
      candidates.push_back(c);
    }
    hi = candidates.back();
  } else {
    return 0.0;
  }

  double best_c = candidates.front();
  double best_v = score(best_c);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = score(candidates[i]);
    if (v < best_v) {
      best_v = v;
      best_c = candidates[i];
      best_i = i;
    }
  }
  // Golden-section refinement between the sampled neighbors of the minimum.
  {
    double a = candidates[best_i > 0 ? best_i - 1 : best_i];
    double b = candidates[best_i + 1 < candidates.size() ? best_i + 1
                                                         : best_i];
    if (a > b) std::swap(a, b);
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = score(x1);
    double f2 = score(x2);
    for (int it = 0; it < 40 && b - a > 1e-6 * (1.0 + std::abs(a)); ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = score(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = score(x2);
      }
    }
    const double mid = 0.5 * (a + b);
    if (score(mid) < best_v) best_c = mid;
  }
  // Keep off exact zeros/poles of the integrand on the axis itself.
  for (int k = 0; k < 8 && !on_axis_ok(best_c); ++k) {
    best_c += 9.5e-4 * (1.0 + std::abs(best_c));
    if (std::isfinite(right_min) && best_c >= right_min) {
      best_c = right_min - 1e-3;
      break;
    }
  }
  return best_c;
}

}  // namespace

ResidueResult MellinBarnesIntegrand::residue_sum(double x, double tol_abs,
                                                 double tol_rel,
                                                 int max_points) const {
  if (!(x > 0.0)) {
    throw ConfigError("residue_sum: argument x must be positive");
  }
  const bool terminates = right_family_terminates(gammas_);
  const double lnx = std::log(x);
  constexpr int kCircleNodes = 64;

  ResidueResult out;
  double p_max = 8.0;
  for (const auto& g : gammas_) {
    if (g.sign_s < 0) p_max = std::max(p_max, std::abs(g.alpha) + 8.0);
  }

  std::vector<PolePoint> poles = right_poles(gammas_, p_max);
  double sum = 0.0;
  double max_term = 0.0;
  int small_streak = 0;
  std::size_t idx = 0;
  int points_done = 0;
  double last_term = 0.0;

  while (true) {
    if (idx >= poles.size()) {
      if (terminates) break;
      p_max *= 2.0;
      poles = right_poles(gammas_, p_max);
      if (idx >= poles.size()) break;
    }
    const PolePoint& pp = poles[idx++];
    // Radius limited by the nearest neighbouring pole.
    double gap = 1.0;
    if (idx >= 2) {
      gap = std::min(gap, pp.position - poles[idx - 2].position);
    }
    if (idx < poles.size()) {
      gap = std::min(gap, poles[idx].position - pp.position);
    }
    const double radius = std::min(0.35, 0.4 * gap);

    std::complex<double> circ = 0.0;
    for (int j = 0; j < kCircleNodes; ++j) {
      const double theta = 2.0 * kPi * (j + 0.5) / kCircleNodes;
      const std::complex<double> e(std::cos(theta), std::sin(theta));
      const std::complex<double> s = pp.position + radius * e;
      circ += std::exp(log_integrand(s) + s * lnx) * e;
    }
    out.nodes += kCircleNodes;
    const double term = -(radius / kCircleNodes) * circ.real();
    sum += term;
    last_term = std::abs(term);
    max_term = std::max(max_term, last_term);
    ++points_done;

    const double tol = std::max(tol_abs, tol_rel * std::abs(sum));
    if (!terminates) {
      if (last_term < 0.1 * tol) {
        if (++small_streak >= 3) break;
      } else {
        small_streak = 0;
      }
      if (max_term > 1e13 * std::max(std::abs(sum), 1e-300)) {
        throw PrecisionLoss(
            "residue_sum: catastrophic cancellation, terms exceed the sum by "
            "more than thirteen digits");
      }
      if (points_done >= max_points) {
        out.value = sum;
        out.error = last_term + 1e-14 * max_term;
        out.terminated = false;
        return out;
      }
    }
  }

  out.value = sum;
  out.terminated = true;
  out.error = (terminates ? 0.0 : last_term) + 1e-14 * max_term +
              1e-15 * std::abs(sum);
  return out;
}

PolyLogSeries MellinBarnesIntegrand::exact_polylog(int max_points) const {
  if (!right_family_terminates(gammas_)) {
    throw PrecisionLoss(
        "exact_polylog: right pole family does not terminate");
  }
  double p_max = 2.0;
  for (const auto& g : gammas_) {
    if (g.sign_s < 0) p_max = std::max(p_max, std::abs(g.alpha) + 2.0);
  }
  std::vector<PolePoint> poles = right_poles(gammas_, p_max);
  if (static_cast<int>(poles.size()) > max_points) {
    throw PrecisionLoss("exact_polylog: pole set too large");
  }

  constexpr int kCircleNodes = 96;
  const double radius = 0.35;
  std::vector<PolyLogTerm> terms;
  for (const auto& pp : poles) {
    const double rounded = std::round(pp.position);
    if (std::abs(pp.position - rounded) > 1e-9) {
      throw InadmissibleParameters(
          "exact_polylog: non-integer pole at position " +
          std::to_string(pp.position));
    }
    // Laurent coefficients a_{-1-k} of F around the pole by circle quadrature;
    // the residue of F(s) x^s then contributes x^p ln(x)^k / k! pieces.
    std::vector<std::complex<double>> f_vals(kCircleNodes);
    for (int j = 0; j < kCircleNodes; ++j) {
      const double theta = 2.0 * kPi * (j + 0.5) / kCircleNodes;
      const std::complex<double> e(std::cos(theta), std::sin(theta));
      f_vals[j] = std::exp(log_integrand(pp.position + radius * e));
    }
    for (int k = 0; k < pp.multiplicity; ++k) {
      std::complex<double> acc = 0.0;
      double rpow = std::pow(radius, k + 1);
      for (int j = 0; j < kCircleNodes; ++j) {
        const double theta = 2.0 * kPi * (j + 0.5) / kCircleNodes;
        const std::complex<double> e(std::cos((k + 1) * theta),
                                     std::sin((k + 1) * theta));
        acc += f_vals[j] * e;
      }
      const std::complex<double> laurent = acc * (rpow / kCircleNodes);
      if (std::abs(laurent.imag()) >
          1e-8 * std::max(1.0, std::abs(laurent.real()))) {
        throw PrecisionLoss(
            "exact_polylog: residue came out complex, which signals a "
            "mis-grouped pole family");
      }
      double factorial = 1.0;
      for (int f = 2; f <= k; ++f) factorial *= f;
      const double coeff = -laurent.real() / factorial;
      if (coeff != 0.0) {
        terms.push_back({static_cast<int>(rounded), k, coeff});
      }
    }
  }
  return PolyLogSeries(std::move(terms));
}

MellinBarnesIntegrand meijer_integrand(const MeijerGParams& params) {
  MellinBarnesIntegrand mb;
  for (double cj : params.c) mb.add_gamma(cj, -1, +1);
  for (double aj : params.a) mb.add_gamma(1.0 - aj, +1, +1);
  for (double bj : params.b) mb.add_gamma(bj, -1, -1);
  for (double dj : params.d) mb.add_gamma(1.0 - dj, +1, -1);
  return mb;
}

std::string describe(const MeijerGParams& params) {
  std::ostringstream os;
  auto list = [&os](const std::vector<double>& v) {
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ",";
      os << v[i];
    }
    os << ")";
  };
  os << "G[a=";
  list(params.a);
  os << " b=";
  list(params.b);
  os << " c=";
  list(params.c);
  os << " d=";
  list(params.d);
  os << "]";
  return os.str();
}

double eval_inverse_mellin(const MellinBarnesIntegrand& mb, double x,
                           EvalDiagnostics* diag, double tol_abs,
                           double tol_rel, const std::string& context,
                           bool best_effort) {
  if (!(x > 0.0)) {
    throw ConfigError("eval_inverse_mellin: argument must be positive, got " +
                      std::to_string(x) + " " + context);
  }
  const auto [left_max, right_min] = mb.strip();
  if (!(left_max < right_min)) {
    throw InadmissibleParameters(
        "eval_inverse_mellin: pole families cannot be separated by a "
        "contour " + context);
  }
  const double decay = mb.decay_rate();
  const bool have_right = std::isfinite(right_min);
  const bool terminates = right_family_terminates(mb.gammas());

  auto contour_eval = [&]() -> std::pair<double, EvalDiagnostics> {
    const double c = pick_contour(mb, x, left_max, right_min);
    ContourResult r = mb.evaluate_contour(c, x, tol_abs, tol_rel);
    EvalDiagnostics d;
    d.method = EvalDiagnostics::Method::kContour;
    d.nodes = r.nodes;
    d.est_error = r.error;
    return {r.value, d};
  };

  auto residue_eval = [&]() -> std::pair<double, EvalDiagnostics> {
    ResidueResult r = mb.residue_sum(x, tol_abs, tol_rel);
    EvalDiagnostics d;
    d.method = EvalDiagnostics::Method::kResidueSeries;
    d.nodes = r.nodes;
    d.est_error = r.error;
    return {r.value, d};
  };

  // A terminating residue series is exact. A non-terminating one is a
  // power-series expansion whose coefficients carry a factorial power set by
  // the rightward growth of |F|: it converges everywhere for negative growth,
  // inside the unit argument for zero growth, and nowhere otherwise.
  const int growth = mb.right_closure_growth();
  const bool residue_convergent =
      terminates || growth < 0 || (growth == 0 && x < 1.0);
  const bool residue_available = have_right && residue_convergent;
  const bool contour_available = decay > 0.0;
  const bool residue_first =
      residue_available && (terminates || x < 1.0 || !contour_available);
  if (!residue_available && !contour_available) {
    throw InadmissibleParameters(
        "eval_inverse_mellin: no convergent evaluation route " + context);
  }

  std::pair<double, EvalDiagnostics> result;
  bool ok = false;
  std::string first_failure;
  auto attempt = [&](bool residue) {
    try {
      auto r = residue ? residue_eval() : contour_eval();
      if (!std::isfinite(r.first) || !std::isfinite(r.second.est_error)) {
        throw PrecisionLoss("eval_inverse_mellin: non-finite evaluation");
      }
      if (!ok || r.second.est_error < result.second.est_error) {
        result = r;
      }
      ok = true;
    } catch (const NumericalError& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  };

  attempt(residue_first);
  auto want = [&] {
    return std::max(tol_abs, tol_rel * std::abs(result.first));
  };
  if ((!ok || result.second.est_error > want()) &&
      (residue_first ? contour_available : residue_available)) {
    attempt(!residue_first);
  }

  if (!ok) {
    throw PrecisionLoss("eval_inverse_mellin: evaluation failed " + context +
                        ": " + first_failure);
  }
  if (!best_effort && result.second.est_error > want()) {
    throw PrecisionLoss(
        "eval_inverse_mellin: estimated error " +
        std::to_string(result.second.est_error) + " exceeds tolerance " +
        std::to_string(want()) + " at x = " + std::to_string(x) + " " +
        context);
  }
  if (diag != nullptr) {
    *diag = result.second;
  }
  return result.first;
}

double meijer_g(const MeijerGParams& params, double x, EvalDiagnostics* diag,
                double tol_abs, double tol_rel) {
  MellinBarnesIntegrand mb = meijer_integrand(params);
  return eval_inverse_mellin(mb, x, diag, tol_abs, tol_rel,
                             "for " + describe(params));
}

}  // namespace sinrkit
