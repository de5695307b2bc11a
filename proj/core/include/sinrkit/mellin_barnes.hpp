#pragma once

#include <complex>
#include <string>
#include <vector>

#include "sinrkit/polylog.hpp"

namespace sinrkit {

// One factor Gamma(alpha + sign_s * s), weighted by sign_term (+1 when it
// multiplies the integrand, -1 when it divides).
struct GammaTerm {
  double alpha = 0.0;
  int sign_s = 1;
  int sign_term = 1;
};

// Real-coefficient polynomial, coeffs[k] * s^k.
using Poly = std::vector<double>;

// Coefficients of scale * prod_i (s - roots[i]).
Poly poly_from_roots(const std::vector<double>& roots, double scale);

struct ContourResult {
  double value = 0.0;
  double error = 0.0;
  long nodes = 0;
};

struct ResidueResult {
  double value = 0.0;
  double error = 0.0;
  long nodes = 0;      // integrand evaluations across all residue circles
  bool terminated = false;  // true when the pole set was finite (exact sum)
};

// Inverse Mellin integrand
//   F(s) = exp(log_prefactor) * prod Gamma(alpha_i + e_i s)^{t_i}
//          * prod P_j(s) / prod Q_k(s)
// evaluated as f(x) = (1/2 pi i) Integral F(s) x^s ds along Re s = c.
// Callers assemble the factor list, then either run the vertical-contour
// trapezoid with an explicit abscissa or sum residues over the right poles.
class MellinBarnesIntegrand {
 public:
  void add_gamma(double alpha, int sign_s, int sign_term) {
    gammas_.push_back({alpha, sign_s, sign_term});
  }
  void add_poly_numer(Poly p) { numer_polys_.push_back(std::move(p)); }
  void add_poly_denom(Poly p) { denom_polys_.push_back(std::move(p)); }
  void add_log_prefactor(double lp) { log_prefactor_ += lp; }

  const std::vector<GammaTerm>& gammas() const { return gammas_; }

  // log F(s), up to an additive 2 pi i k ambiguity that exponentiation kills.
  std::complex<double> log_integrand(std::complex<double> s) const;

  // F(s) with overflow-prone magnitudes handled through the log form.
  std::complex<double> integrand(std::complex<double> s) const;

  // Exponential decay rate of |F(c + it)| in |t|: (pi/2) * sum of sign_term.
  double decay_rate() const;

  // Growth exponent of |F(s)| toward Re s = +inf, in units of s*log(s):
  // sum over gamma factors of sign_s * sign_term. The right-pole residue
  // series behaves like sum_k k!^g x^k up to geometric factors, so it
  // converges for all x when g < 0, for x < 1 when g == 0, and diverges
  // (asymptotic only) when g > 0.
  int right_closure_growth() const;

  // f(x) by trapezoid summation along Re s = c with node-halving refinement.
  // The integrand must not have a pole on the line. tol_abs/tol_rel control
  // the successive-refinement stopping test.
  ContourResult evaluate_contour(double c, double x, double tol_abs = 1e-12,
                                 double tol_rel = 1e-11) const;

  // f(x) = - sum over right poles of Res[F(s) x^s]. Gamma-factor poles and
  // polynomial roots are combined into per-point multiplicities; residues are
  // extracted by small-circle quadrature, so multiple poles need no special
  // casing. Stops when terms fall below the tolerances or the pole set ends.
  ResidueResult residue_sum(double x, double tol_abs = 1e-12,
                            double tol_rel = 1e-11, int max_points = 600) const;

  // Exact finite power-log expansion; valid when every right pole is an
  // integer and the pole set terminates (checked, throws PrecisionLoss if the
  // expansion does not terminate within max_points).
  PolyLogSeries exact_polylog(int max_points = 400) const;

  // Largest real part of any left-family pole and smallest real part of any
  // right-family pole, after numerator/denominator cancellation. The second
  // value is +inf when no right pole survives, the first -inf likewise.
  std::pair<double, double> strip() const;

 private:
  std::vector<GammaTerm> gammas_;
  std::vector<Poly> numer_polys_;
  std::vector<Poly> denom_polys_;
  double log_prefactor_ = 0.0;
};

// Parameter block in the layout
//   G(x) = (1/2 pi i) Integral prod_j Gamma(c_j - s) prod_j Gamma(1 - a_j + s)
//          / [ prod_j Gamma(b_j - s) prod_j Gamma(1 - d_j + s) ] x^s ds,
// poles of the c-family to the right of the contour, a-family to the left.
struct MeijerGParams {
  std::vector<double> a;  // upper numerator parameters
  std::vector<double> b;  // upper denominator parameters
  std::vector<double> c;  // lower numerator parameters
  std::vector<double> d;  // lower denominator parameters
};

struct EvalDiagnostics {
  enum class Method { kContour, kResidueSeries };
  Method method = Method::kContour;
  long nodes = 0;
  double est_error = 0.0;
};

// Evaluate f(x) for a fully assembled integrand. Picks the vertical-contour
// route when a separating strip exists and the integrand decays on it, and
// the right-pole residue series otherwise (always when the series
// terminates). Throws InadmissibleParameters when the pole families cannot
// be separated, PrecisionLoss when cancellation or non-convergence defeats
// tol = max(tol_abs, tol_rel * |value|). context tags error messages.
// With best_effort the tolerance check is skipped: the lowest-error finite
// evaluation is returned and diag reports the error actually achieved
// (evaluation failures on every route still throw).
double eval_inverse_mellin(const MellinBarnesIntegrand& mb, double x,
                           EvalDiagnostics* diag, double tol_abs = 1e-10,
                           double tol_rel = 1e-8,
                           const std::string& context = "",
                           bool best_effort = false);

// Evaluate the Meijer G function above for x > 0 with the same route policy
// and error contract as eval_inverse_mellin.
double meijer_g(const MeijerGParams& params, double x, EvalDiagnostics* diag,
                double tol_abs = 1e-10, double tol_rel = 1e-8);

inline double meijer_g(const MeijerGParams& params, double x) {
  return meijer_g(params, x, nullptr);
}

// The integrand container for the G parameter block, exposed so weight and
// kernel code can append extra factors before evaluating.
MellinBarnesIntegrand meijer_integrand(const MeijerGParams& params);

std::string describe(const MeijerGParams& params);

}  // namespace sinrkit
