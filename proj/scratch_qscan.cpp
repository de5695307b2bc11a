// Throwaway: print kernel_K0 on a grid for oracle comparison.
#include <cstdio>

#include "sinrkit/ensemble.hpp"
#include "sinrkit/kernels.hpp"
#include "sinrkit/weights.hpp"

using namespace sinrkit;

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kGaussianProduct;
  spec.n_t = 4;
  spec.M = 2;
  spec.nu = {2, 1};
  WeightFunctions wf(spec);
  for (double y = 0.25; y <= 120.0; y *= 1.3) {
    std::printf("%.17g %.17g\n", y, kernel_K0(wf, 4, y));
  }
  return 0;
}
