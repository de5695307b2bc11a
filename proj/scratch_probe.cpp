// Throwaway: dissect the K0 monomial-annihilation quadrature.
#include <cmath>
#include <cstdio>
#include <vector>

#include "sinrkit/ensemble.hpp"
#include "sinrkit/kernels.hpp"
#include "sinrkit/quadrature.hpp"
#include "sinrkit/weights.hpp"

using namespace sinrkit;

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  EnsembleSpec s;
  s.kind = EnsembleKind::kGaussianProduct;
  s.n_t = 4;
  s.M = 2;
  s.nu = {2, 1};
  WeightFunctions wf(s);
  for (int m = 2; m <= 3; ++m) {
    auto f = [&](double y) { return kernel_K0(wf, 4, y) * std::pow(y, m); };
    const std::vector<double> edges = {0.0,  1.0,   10.0,  40.0,
                                       100.0, 200.0, 400.0, 900.0};
    double tot = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
      auto r = quad_adaptive(f, edges[i], edges[i + 1], 1e-13, 1e-12);
      tot += r.value;
      std::printf("m=%d [%5.0f,%5.0f] val=%+.12e err=%.2e\n", m, edges[i],
                  edges[i + 1], r.value, r.error);
    }
    std::printf("m=%d total=%+.12e\n\n", m, tot);
  }
  return 0;
}
