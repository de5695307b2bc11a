// Throwaway numeric smoke checks (not part of the build).
#include <cmath>
#include <cstdio>
#include <memory>

#include "sinrkit/analytics.hpp"
#include "sinrkit/io.hpp"
#include "sinrkit/kernels.hpp"
#include "sinrkit/mellin_barnes.hpp"
#include "sinrkit/monte_carlo.hpp"
#include "sinrkit/quadrature.hpp"
#include "sinrkit/special.hpp"
#include "sinrkit/weights.hpp"

using namespace sinrkit;

static int failures = 0;
static void check(const char* name, double got, double want, double tol) {
  const double err = std::abs(got - want);
  const bool ok = err <= tol;
  if (!ok) ++failures;
  std::printf("%-52s got=%.12g want=%.12g err=%.3g %s\n", name, got, want,
              err, ok ? "OK" : "FAIL");
}

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  // 1. log identity: G^{1,2}_{2,2}(a=1,1; c=1; d=0 | x) = ln(1+x)
  {
    MeijerGParams p;
    p.a = {1.0, 1.0};
    p.c = {1.0};
    p.d = {0.0};
    for (double x : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "meijer log identity x=%g", x);
      check(buf, meijer_g(p, x), std::log1p(x), 1e-9 * std::max(1.0, std::log1p(x)));
    }
  }

  // 2. Gaussian M=1 omega via engine vs elementary
  {
    EnsembleSpec s;
    s.kind = EnsembleKind::kGaussianProduct;
    s.n_t = 2; s.M = 1; s.nu = {3};
    WeightFunctions wf(s);
    for (double x : {0.25, 1.0, 4.0}) {
      check("gauss M=1 omega", wf.omega(x), std::pow(x, 3) * std::exp(-x), 1e-10);
      check("gauss M=1 omega'", wf.omega_derivative(x, 1),
            (3.0 / x - 1.0) * std::pow(x, 3) * std::exp(-x), 1e-9);
    }
  }

  // 3. ZF pdf normalization + exponential special case (M=1, nu=0)
  {
    EnsembleSpec s;
    s.kind = EnsembleKind::kGaussianProduct;
    s.n_t = 2; s.M = 1; s.nu = {0};
    WeightFunctions wf(s);
    const double delta = 1.5, sigma = 2.0;
    for (double g : {0.01, 0.5, 2.0}) {
      check("zf exp pdf", zf_pdf_specialized(wf, delta, sigma, g),
            sigma / delta * std::exp(-sigma * g / delta), 1e-13);
    }
    auto wfp = std::make_shared<WeightFunctions>(s);
    auto handle = make_kernel_handle(wfp, s.n_t);
    for (double g : {0.01, 0.5, 2.0}) {
      check("zf generic pdf vs specialized",
            zf_pdf_generic(handle, delta, sigma, g),
            zf_pdf_specialized(wf, delta, sigma, g), 1e-8);
    }
  }

  // 4. case A: n_t=2, M=1, nu=0, delta=1 -> R_zf = 2 e E1(1)
  {
    EnsembleSpec s;
    s.kind = EnsembleKind::kGaussianProduct;
    s.n_t = 2; s.M = 1; s.nu = {0};
    WeightFunctions wf(s);
    auto rates = zf_sumrate(wf, 1.0, {1.0, 1.0});
    check("case A R_zf closed", rates[0].value_nats, 1.192694724646388, 1e-8);
    check("case A R_zf quad", rates[1].value_nats, 1.192694724646388, 1e-8);

    auto mm = mmse_sumrate(wf, 2, 1.0);
    check("case A R_mmse closed", mm[0].value_nats, 1.57808417393916, 1e-8);
    check("case A R_mmse quad", mm[1].value_nats, 1.57808417393916, 1e-8);

    // product form vs weight form density
    for (double g : {0.05, 0.5, 1.5, 6.0}) {
      const double a = mmse_pdf_product_form(wf, 1.0, g);
      const double b = mmse_pdf_weight_form(wf, 1.0, g);
      char buf[64];
      std::snprintf(buf, sizeof buf, "mmse product vs weight g=%g", g);
      check(buf, a, b, 1e-8 * std::max(1.0, std::abs(b)));
    }
    // mmse pdf normalization
    auto pdf = [&](double g) { return mmse_pdf(wf, 1.0, g); };
    QuadResult q = quad_to_infinity(pdf, 0.0, 1e-9, 1e-9);
    check("case A mmse pdf normalization", q.value, 1.0, 1e-7);
  }

  // 5. Figure-1 ensemble: n_t=8, M=3, nu=(5,2,2)
  {
    EnsembleSpec s;
    s.kind = EnsembleKind::kGaussianProduct;
    s.n_t = 8; s.M = 3; s.nu = {5, 2, 2};
    WeightFunctions wf(s);
    check("fig1 Momega(2)/Momega(1)", wf.mellin(2.0) / wf.mellin(1.0), 54.0,
          1e-9);
    std::vector<double> ones(8, 1.0);
    auto r8 = zf_sumrate(wf, 0.125, ones);
    check("fig1 zf rate d=1/8", r8[0].value_nats, 14.04810464, 2e-7);
    auto r1 = zf_sumrate(wf, 1.0, ones);
    check("fig1 zf rate d=1", r1[0].value_nats, 28.78304594, 2e-7);
    auto r10 = zf_sumrate(wf, 10.0, ones);
    check("fig1 zf rate d=10", r10[0].value_nats, 46.87373806, 2e-7);
    auto m1 = mmse_sumrate(wf, 8, 1.0);
    check("fig1 mmse rate d=1", m1[0].value_nats, 29.99132252, 2e-7);
    // pdf normalization at delta=1, both receivers
    GridSpec grid;
    auto zc = zf_density_curve(wf, 1.0, 1.0, grid);
    double mass = 0.0;
    for (std::size_t i = 1; i < zc.points.size(); ++i) {
      mass += 0.5 * (zc.points[i].density + zc.points[i - 1].density) *
              (zc.points[i].gamma - zc.points[i - 1].gamma);
    }
    check("fig1 zf curve mass", mass, 1.0, 2e-4);
  }

  // 6. Jacobi: n_t=2, M=1, nu=0, mu=3
  {
    EnsembleSpec s;
    s.kind = EnsembleKind::kJacobiProduct;
    s.n_t = 2; s.M = 1; s.nu = {0}; s.mu = {3};
    WeightFunctions wf(s);
    // omega = Mellin^-1[Gamma(s)Gamma(4)/Gamma(s+3)] ... check against
    // direct: Momega(s) = Gamma(s)/Gamma(s+3), omega(x) = (1-x)^2/Gamma(3)?
    // Mellin of (1-x)^2 on (0,1): B(s,3) = Gamma(s)Gamma(3)/Gamma(s+3).
    for (double x : {0.1, 0.5, 0.9}) {
      check("jacobi omega", wf.omega(x), (1.0 - x) * (1.0 - x) / 2.0, 1e-12);
    }
    const double delta = 1.0;
    auto rates = zf_sumrate(wf, delta, {1.0, 1.0});
    check("jacobi zf dual", rates[0].value_nats, rates[1].value_nats, 1e-8);
    auto mm = mmse_sumrate(wf, 2, delta);
    check("jacobi mmse dual", mm[0].value_nats, mm[1].value_nats, 1e-8);
    // mmse pdf: weight form vs generic kernel route
    auto wfp = std::make_shared<WeightFunctions>(s);
    auto handle = make_kernel_handle(wfp, s.n_t);
    for (double g : {0.05, 0.3, 0.8}) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "jacobi mmse weight vs generic g=%g", g);
      check(buf, mmse_pdf_weight_form(wf, delta, g),
            mmse_pdf_generic(handle, delta, g), 1e-7);
    }
    check("jacobi mmse pdf beyond support",
          mmse_pdf_weight_form(wf, delta, 1.5), 0.0, 0.0);
    // normalization of the mmse pdf on (0, delta]
    auto pdf = [&](double g) { return mmse_pdf(wf, delta, g); };
    QuadResult q = quad_adaptive(pdf, 0.0, delta, 1e-9, 1e-9);
    check("jacobi mmse pdf normalization", q.value, 1.0, 1e-7);
  }

  // 7. MC sanity: ZF exponential, KS
  {
    EnsembleSpec s;
    s.kind = EnsembleKind::kGaussianProduct;
    s.n_t = 2; s.M = 1; s.nu = {0};
    MCConfig cfg;
    cfg.ensemble = s;
    cfg.receiver = Receiver::kZf;
    cfg.delta = 1.0;
    cfg.samples = 20000;
    cfg.seed = 7;
    auto samp = sinr_samples(cfg);
    double mean = 0.0;
    for (double v : samp.values) mean += v;
    mean /= samp.values.size();
    check("mc zf exp mean", mean, 1.0, 0.03);

    WeightFunctions wf(s);
    GridSpec grid;
    auto curve = zf_density_curve(wf, 1.0, 1.0, grid);
    auto rep = compare(curve, samp.values);
    std::printf("KS = %.5f threshold %.5f pass=%d l1=%.4f\n", rep.ks_distance,
                rep.ks_threshold, rep.ks_pass ? 1 : 0, rep.l1_binned);
    if (!rep.ks_pass) ++failures;
  }

  std::printf("\n%s (failures=%d)\n", failures == 0 ? "ALL OK" : "FAILURES",
              failures);
  return failures == 0 ? 0 : 1;
}
