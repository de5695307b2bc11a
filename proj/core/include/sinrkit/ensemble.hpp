#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sinrkit/linalg.hpp"

namespace sinrkit {

enum class EnsembleKind { kGaussianProduct, kJacobiProduct, kGenericKernel };

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& s);

// A kernel section tabulated on a strictly increasing grid of at least four
// points. Evaluation interpolates with the cubic through the four nodes
// nearest the query point (piecewise-cubic Lagrange, exact for cubics);
// queries outside [y.front(), y.back()] return 0, so tables must extend far
// enough that the section is negligible beyond their ends.
struct KernelTabulation {
  std::vector<double> y;
  std::vector<double> value;

  bool empty() const { return y.empty(); }
};

double interpolate_cubic(const KernelTabulation& table, double y);

// Channel ensemble description. For the product kinds, the channel is a
// product of M independent factors with rectangularity offsets nu[0..M-1]
// (receive dimension n_r = n_t + nu[M-1]); the Jacobi kind additionally
// carries the truncation depths mu. The generic kind bypasses sampling and
// supplies the correlation-kernel evaluator directly.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::kGaussianProduct;
  int n_t = 2;
  int M = 1;
  std::vector<int> nu;
  std::vector<int> mu;  // Jacobi only

  // GenericKernel only. The density and rate formulas need two sections of
  // the correlation kernel: K(0, .) for zero-forcing and K(-1/delta, .) for
  // MMSE. Either supply the full evaluator K(x, y), or tabulate the sections
  // (kernel_shift_x records the x the second table was sampled at, i.e.
  // -1/delta for the intended receiver configuration). The callable wins
  // when both are present.
  std::function<double(double, double)> generic_kernel;
  KernelTabulation kernel_table_at_zero;   // y -> K(0, y)
  KernelTabulation kernel_table_at_shift;  // y -> K(kernel_shift_x, y)
  double kernel_shift_x = 0.0;

  int n_r() const { return n_t + (nu.empty() ? 0 : nu.back()); }

  bool is_product() const { return kind != EnsembleKind::kGenericKernel; }
};

// Transmit-side correlation. An empty sigma_t means identity (uncorrelated).
struct CorrelationSpec {
  ComplexMatrix sigma_t;  // n_t x n_t, Hermitian positive definite

  bool is_identity() const { return sigma_t.size() == 0; }
};

// Per-stream inverse-correlation diagonal sigma_k = [Sigma_t^{-1}]_{kk};
// all ones when the correlation is identity.
std::vector<double> correlation_sigma_k(const CorrelationSpec& corr, int n_t);

enum class Receiver { kZf, kMmse };

std::string to_string(Receiver r);

struct ReceiverConfig {
  Receiver receiver = Receiver::kZf;
  double es = 1.0;  // symbol energy
  double n0 = 1.0;  // noise level
  std::optional<double> delta;  // direct per-stream SNR scale, bypasses es/n0
};

// delta = (es/n0) * alpha / n_t unless overridden directly.
double resolve_delta(const ReceiverConfig& rc, double alpha, int n_t);

// Throws ConfigError with a field-path message ("ensemble.mu[1]: ...") on the
// first violated constraint.
void validate(const EnsembleSpec& spec);
void validate(const CorrelationSpec& corr, int n_t);

// JSON round-trip for configuration files and run manifests. Complex matrix
// entries serialize as [re, im] pairs; plain numbers are accepted on input.
EnsembleSpec ensemble_from_json_text(const std::string& text);
EnsembleSpec ensemble_from_json_file(const std::string& path);
std::string ensemble_to_json_text(const EnsembleSpec& spec,
                                  const CorrelationSpec& corr);
CorrelationSpec correlation_from_json_text(const std::string& text);
CorrelationSpec correlation_from_json_file(const std::string& path);

}  // namespace sinrkit
