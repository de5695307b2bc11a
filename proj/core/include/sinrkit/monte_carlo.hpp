#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sinrkit/analytics.hpp"
#include "sinrkit/ensemble.hpp"
#include "sinrkit/linalg.hpp"
#include "sinrkit/rng.hpp"

namespace sinrkit {

struct MCConfig {
  EnsembleSpec ensemble;
  CorrelationSpec correlation;  // identity when empty
  Receiver receiver = Receiver::kZf;
  double delta = 1.0;
  long samples = 100000;
  std::uint64_t seed = 1;
  int workers = 4;       // independent sub-seeded streams, merged in order
  int stream_index = 0;  // which stream's SINR sinr_samples records
};

// One channel draw: the product of M factor matrices, right-multiplied by a
// square root of the transmit correlation when one is configured.
ComplexMatrix sample_channel(const EnsembleSpec& spec,
                             const CorrelationSpec& corr, RngState& rng);

struct SinrSamples {
  std::vector<double> values;  // sorted ascending (canonical merge order)
  long rejected = 0;           // draws dropped by Cholesky failure
  long requested = 0;
};

// One SINR per channel draw for the configured stream. A rejection rate
// above 0.1% throws ExcessiveRejections.
SinrSamples sinr_samples(const MCConfig& config);

struct PairedSinrSamples {
  std::vector<double> zf;    // draw order (worker-major), not sorted
  std::vector<double> mmse;  // same draws, same order
  long rejected = 0;
};

// Both receivers evaluated on the same channel draws, preserving pairing for
// per-draw ordering checks.
PairedSinrSamples paired_sinr_samples(const MCConfig& config);

struct SumRateEstimate {
  double value_nats = 0.0;
  double std_error = 0.0;  // delete-one jackknife of the mean = s/sqrt(n)
  long samples = 0;
  long rejected = 0;
};

// Sample mean of sum_k ln(1 + gamma_k) over channel draws.
SumRateEstimate empirical_sumrate(const MCConfig& config);

struct AlphaResult {
  double alpha = 1.0;
  double std_error = 0.0;  // 0 when the value is closed-form
  bool is_estimate = false;
  long samples = 0;
};

// Energy normalization alpha = n_t n_r / E[tr H^H H]. Closed form for
// Gaussian products; Monte Carlo estimate (with standard error) for
// truncated-unitary products.
AlphaResult normalization_alpha(const EnsembleSpec& spec,
                                const CorrelationSpec& corr,
                                std::uint64_t seed = 12345,
                                long samples = 10000);

struct VerificationReport {
  double ks_distance = 0.0;
  double ks_threshold = 0.0;
  bool ks_pass = false;
  double l1_binned = 0.0;  // on the curve's own grid
  long samples = 0;
  long rejected = 0;
  bool sufficient_samples = true;  // enough draws for the 0.01 KS threshold
  std::string note;
  // Sum-rate check, filled by callers that run one (negative se = not run).
  double sumrate_empirical = 0.0;
  double sumrate_analytic = 0.0;
  double sumrate_std_error = -1.0;
  bool sumrate_pass = true;
  std::uint64_t seed = 0;

  bool pass() const {
    return ks_pass && sumrate_pass;
  }
};

// Kolmogorov-Smirnov distance of the samples against the cumulative
// trapezoid of the analytic curve (with tail-mass correction), plus a binned
// L1 distance on the curve's grid. The KS threshold is max(0.01, 1.63/sqrt(n))
// with a note when n is too small for the 0.01 level.
VerificationReport compare(const DensityCurve& curve,
                           const std::vector<double>& samples);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  double density = 0.0;
  long count = 0;
};

// Freedman-Diaconis histogram of the samples (bin count overridable).
std::vector<HistogramBin> histogram(const std::vector<double>& samples,
                                    int bins_override = 0);

}  // namespace sinrkit
