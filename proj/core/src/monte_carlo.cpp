#include <algorithm>
#include <cmath>
#include <numeric>

#include "sinrkit/errors.hpp"
#include "sinrkit/monte_carlo.hpp"

namespace sinrkit {

namespace {

// Split `total` draws across `workers` contiguous blocks (first blocks get
// the remainder), so the partition is deterministic for a fixed worker count.
std::vector<long> partition_draws(long total, int workers) {
  if (workers < 1) throw ConfigError("mc.workers: must be at least 1");
  std::vector<long> block(workers, total / workers);
  for (long i = 0; i < total % workers; ++i) ++block[i];
  return block;
}

ComplexMatrix correlation_root(const CorrelationSpec& corr) {
  // Any W with W^H W = Sigma_t yields the right Gram statistics for the
  // unitarily invariant factor products; the adjoint of the Cholesky factor
  // is the cheapest such root.
  return cholesky_lower(corr.sigma_t).adjoint();
}

struct DrawContext {
  const EnsembleSpec& spec;
  bool correlated;
  ComplexMatrix root;  // set when correlated
};

ComplexMatrix draw_channel(const DrawContext& ctx, RngState& rng) {
  const EnsembleSpec& spec = ctx.spec;
  const int n_t = spec.n_t;
  ComplexMatrix h;
  if (spec.kind == EnsembleKind::kGaussianProduct) {
    int cols = n_t;
    for (int j = 0; j < spec.M; ++j) {
      const int rows = n_t + spec.nu[j];
      ComplexMatrix factor = sample_ginibre(rows, cols, rng);
      h = (j == 0) ? std::move(factor) : ComplexMatrix(factor * h);
      cols = rows;
    }
  } else if (spec.kind == EnsembleKind::kJacobiProduct) {
    int cols = n_t;
    for (int j = 0; j < spec.M; ++j) {
      const int rows = n_t + spec.nu[j];
      const int full = n_t + spec.mu[j];
      ComplexMatrix factor = sample_haar_truncation(full, rows, cols, rng);
      h = (j == 0) ? std::move(factor) : ComplexMatrix(factor * h);
      cols = rows;
    }
  } else {
    throw ConfigError(
        "ensemble.kind: sampling requires a product ensemble (gaussian or "
        "jacobi)");
  }
  if (ctx.correlated) {
    h = ComplexMatrix(h * ctx.root);
  }
  return h;
}

void check_mc_config(const MCConfig& cfg) {
  validate(cfg.ensemble);
  if (!cfg.correlation.is_identity()) {
    validate(cfg.correlation, cfg.ensemble.n_t);
    if (cfg.receiver == Receiver::kMmse) {
      throw ConfigError(
          "correlation.sigma_t: transmit correlation is only supported for "
          "the zero-forcing receiver; the implemented MMSE formulas assume "
          "an identity transmit covariance");
    }
  }
  // delta = 0 is a valid degenerate point for sampling (every SINR is 0 and
  // the sum rate is exactly 0); the analytic formulas require delta > 0 and
  // enforce that themselves.
  if (!(cfg.delta >= 0.0)) {
    throw ConfigError("receiver.delta: must be nonnegative");
  }
  if (cfg.samples < 1) throw ConfigError("mc.samples: must be positive");
  if (cfg.workers < 1) throw ConfigError("mc.workers: must be at least 1");
  if (cfg.stream_index < 0 || cfg.stream_index >= cfg.ensemble.n_t) {
    throw ConfigError("mc.stream_index: must lie in [0, n_t)");
  }
}

DrawContext make_context(const MCConfig& cfg) {
  DrawContext ctx{cfg.ensemble, !cfg.correlation.is_identity(), {}};
  if (ctx.correlated) ctx.root = correlation_root(cfg.correlation);
  return ctx;
}

void check_rejections(long rejected, long total) {
  if (rejected * 1000 > total) {
    throw ExcessiveRejections(
        "mc: " + std::to_string(rejected) + " of " + std::to_string(total) +
        " draws failed factorization; the ensemble is likely misconfigured");
  }
}

}  // namespace

ComplexMatrix sample_channel(const EnsembleSpec& spec,
                             const CorrelationSpec& corr, RngState& rng) {
  validate(spec);
  DrawContext ctx{spec, !corr.is_identity(), {}};
  if (ctx.correlated) {
    validate(corr, spec.n_t);
    ctx.root = correlation_root(corr);
  }
  return draw_channel(ctx, rng);
}

SinrSamples sinr_samples(const MCConfig& cfg) {
  check_mc_config(cfg);
  const DrawContext ctx = make_context(cfg);
  const auto blocks = partition_draws(cfg.samples, cfg.workers);
  const int n_t = cfg.ensemble.n_t;
  const int k = cfg.stream_index;

  SinrSamples out;
  out.requested = cfg.samples;
  out.values.reserve(cfg.samples);
  for (int w = 0; w < cfg.workers; ++w) {
    RngState rng = substream(cfg.seed, w);
    for (long i = 0; i < blocks[w]; ++i) {
      const ComplexMatrix h = draw_channel(ctx, rng);
      const ComplexMatrix gram = (h.adjoint() * h).eval();
      if (cfg.receiver == Receiver::kZf) {
        try {
          out.values.push_back(cfg.delta / diagonal_of_inverse(gram, k));
        } catch (const NotPositiveDefinite&) {
          ++out.rejected;
        }
      } else {
        ComplexMatrix shifted = cfg.delta * gram;
        for (int d = 0; d < n_t; ++d) shifted(d, d) += 1.0;
        out.values.push_back(1.0 / diagonal_of_inverse(shifted, k) - 1.0);
      }
    }
  }
  check_rejections(out.rejected, cfg.samples);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

PairedSinrSamples paired_sinr_samples(const MCConfig& cfg) {
  check_mc_config(cfg);
  const DrawContext ctx = make_context(cfg);
  const auto blocks = partition_draws(cfg.samples, cfg.workers);
  const int n_t = cfg.ensemble.n_t;
  const int k = cfg.stream_index;

  PairedSinrSamples out;
  out.zf.reserve(cfg.samples);
  out.mmse.reserve(cfg.samples);
  for (int w = 0; w < cfg.workers; ++w) {
    RngState rng = substream(cfg.seed, w);
    for (long i = 0; i < blocks[w]; ++i) {
      const ComplexMatrix h = draw_channel(ctx, rng);
      const ComplexMatrix gram = (h.adjoint() * h).eval();
      double zf = 0.0;
      try {
        zf = cfg.delta / diagonal_of_inverse(gram, k);
      } catch (const NotPositiveDefinite&) {
        ++out.rejected;
        continue;
      }
      ComplexMatrix shifted = cfg.delta * gram;
      for (int d = 0; d < n_t; ++d) shifted(d, d) += 1.0;
      out.zf.push_back(zf);
      out.mmse.push_back(1.0 / diagonal_of_inverse(shifted, k) - 1.0);
    }
  }
  check_rejections(out.rejected, cfg.samples);
  return out;
}

SumRateEstimate empirical_sumrate(const MCConfig& cfg) {
  check_mc_config(cfg);
  const DrawContext ctx = make_context(cfg);
  const auto blocks = partition_draws(cfg.samples, cfg.workers);
  const int n_t = cfg.ensemble.n_t;

  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;
  long rejected = 0;
  for (int w = 0; w < cfg.workers; ++w) {
    RngState rng = substream(cfg.seed, w);
    for (long i = 0; i < blocks[w]; ++i) {
      const ComplexMatrix h = draw_channel(ctx, rng);
      const ComplexMatrix gram = (h.adjoint() * h).eval();
      double rate = 0.0;
      if (cfg.receiver == Receiver::kZf) {
        std::vector<double> diag;
        try {
          diag = diagonal_of_inverse_all(gram);
        } catch (const NotPositiveDefinite&) {
          ++rejected;
          continue;
        }
        for (double d : diag) rate += std::log1p(cfg.delta / d);
      } else {
        ComplexMatrix shifted = cfg.delta * gram;
        for (int d = 0; d < n_t; ++d) shifted(d, d) += 1.0;
        for (double d : diagonal_of_inverse_all(shifted)) {
          rate += std::log1p(1.0 / d - 1.0);
        }
      }
      sum += rate;
      sum_sq += rate * rate;
      ++n;
    }
  }
  check_rejections(rejected, cfg.samples);

  SumRateEstimate est;
  est.samples = n;
  est.rejected = rejected;
  est.value_nats = sum / static_cast<double>(n);
  if (n > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * sum / n) / static_cast<double>(n - 1));
    est.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return est;
}

AlphaResult normalization_alpha(const EnsembleSpec& spec,
                                const CorrelationSpec& corr,
                                std::uint64_t seed, long samples) {
  validate(spec);
  if (!corr.is_identity()) validate(corr, spec.n_t);
  const int n_t = spec.n_t;
  const double n_r = static_cast<double>(spec.n_r());
  const double trace_sigma =
      corr.is_identity() ? static_cast<double>(n_t)
                         : corr.sigma_t.diagonal().real().sum();

  AlphaResult out;
  if (spec.kind == EnsembleKind::kGaussianProduct) {
    double prod = 1.0;
    for (int nu : spec.nu) prod *= static_cast<double>(n_t + nu);
    out.alpha = n_t * n_r / (trace_sigma * prod);
    return out;
  }
  if (spec.kind != EnsembleKind::kJacobiProduct) {
    throw ConfigError(
        "ensemble.kind: normalization is defined for product ensembles only");
  }
  if (samples < 2) throw ConfigError("mc.samples: must be at least 2");

  DrawContext ctx{spec, !corr.is_identity(), {}};
  if (ctx.correlated) ctx.root = correlation_root(corr);
  const auto blocks = partition_draws(samples, 4);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int w = 0; w < 4; ++w) {
    RngState rng = substream(seed, w);
    for (long i = 0; i < blocks[w]; ++i) {
      const double t = draw_channel(ctx, rng).squaredNorm();
      sum += t;
      sum_sq += t * t;
    }
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(
      0.0, (sum_sq - sum * sum / samples) / static_cast<double>(samples - 1));
  const double se_mean = std::sqrt(var / static_cast<double>(samples));
  out.alpha = n_t * n_r / mean;
  out.std_error = out.alpha * se_mean / mean;
  out.is_estimate = true;
  out.samples = samples;
  return out;
}

VerificationReport compare(const DensityCurve& curve,
                           const std::vector<double>& samples) {
  if (curve.points.size() < 3) {
    throw ConfigError("verification.curve: need at least 3 grid points");
  }
  const long n = static_cast<long>(samples.size());
  if (n < 8) {
    throw ConfigError("verification.samples: need at least 8 samples");
  }
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());

  const auto& pts = curve.points;
  const std::size_t m = pts.size();

  // Cumulative trapezoid with tail-mass corrections at both ends.
  std::vector<double> cdf(m, 0.0);
  double mass_lo = 0.0;
  if (pts[0].density > 0.0 && pts[1].density > 0.0) {
    const double e = std::log(pts[1].density / pts[0].density) /
                     std::log(pts[1].gamma / pts[0].gamma);
    if (e > -0.99) mass_lo = pts[0].density * pts[0].gamma / (e + 1.0);
  }
  cdf[0] = mass_lo;
  for (std::size_t i = 1; i < m; ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (pts[i].density + pts[i - 1].density) *
                              (pts[i].gamma - pts[i - 1].gamma);
  }
  double mass_hi = 0.0;
  if (pts[m - 1].density > 0.0 && pts[m - 2].density > 0.0) {
    const double rate =
        std::log(pts[m - 2].density / pts[m - 1].density) /
        (pts[m - 1].gamma - pts[m - 2].gamma);
    mass_hi = rate > 0.0 ? pts[m - 1].density / rate
                         : pts[m - 1].density * pts[m - 1].gamma;
  }
  const double total = cdf[m - 1] + mass_hi;
  if (!(total > 0.0)) {
    throw ConsistencyError("verification.curve: analytic mass is zero");
  }

  // Normalized analytic CDF at x, linear density interpolation per panel.
  const auto analytic_cdf = [&](double x) {
    if (x <= pts[0].gamma) {
      return mass_lo * std::min(1.0, std::max(0.0, x / pts[0].gamma)) / total;
    }
    if (x >= pts[m - 1].gamma) return cdf[m - 1] / total;
    const auto it = std::upper_bound(
        pts.begin(), pts.end(), x,
        [](double v, const DensityPoint& p) { return v < p.gamma; });
    const std::size_t i = static_cast<std::size_t>(it - pts.begin());
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    const double t = (x - a.gamma) / (b.gamma - a.gamma);
    const double rho_x = a.density + t * (b.density - a.density);
    return (cdf[i - 1] + 0.5 * (a.density + rho_x) * (x - a.gamma)) / total;
  };

  VerificationReport rep;
  rep.samples = n;
  double ks = 0.0;
  for (long i = 0; i < n; ++i) {
    const double f = analytic_cdf(sorted[i]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n));
  }
  rep.ks_distance = ks;
  const double relaxed = 1.63 / std::sqrt(static_cast<double>(n));
  rep.ks_threshold = std::max(0.01, relaxed);
  rep.sufficient_samples = relaxed <= 0.01;
  if (!rep.sufficient_samples) {
    rep.note = "insufficient samples for the 0.01 KS threshold; using the "
               "1% critical value 1.63/sqrt(n)";
  }
  rep.ks_pass = rep.ks_distance < rep.ks_threshold;

  // Binned L1 on the curve's grid (probability per panel plus edge bins).
  double l1 = 0.0;
  {
    std::size_t idx = 0;
    const auto count_upto = [&](double edge) {
      long c = 0;
      while (idx < sorted.size() && sorted[idx] <= edge) {
        ++idx;
        ++c;
      }
      return c;
    };
    double emp = static_cast<double>(count_upto(pts[0].gamma)) / n;
    l1 += std::abs(emp - mass_lo / total);
    for (std::size_t i = 1; i < m; ++i) {
      emp = static_cast<double>(count_upto(pts[i].gamma)) / n;
      l1 += std::abs(emp - (cdf[i] - cdf[i - 1]) / total);
    }
    emp = static_cast<double>(sorted.size() - idx) / n;
    l1 += std::abs(emp - mass_hi / total);
  }
  rep.l1_binned = l1;
  return rep;
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples,
                                    int bins_override) {
  if (samples.size() < 2) {
    throw ConfigError("histogram.samples: need at least 2 samples");
  }
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const std::size_t n = sorted.size();

  int bins = bins_override;
  if (bins <= 0) {
    // Freedman-Diaconis: width 2 IQR n^(-1/3).
    const double q1 = sorted[n / 4];
    const double q3 = sorted[(3 * n) / 4];
    const double width =
        2.0 * (q3 - q1) / std::cbrt(static_cast<double>(n));
    bins = width > 0.0 && hi > lo
               ? std::max(1, static_cast<int>(std::ceil((hi - lo) / width)))
               : 1;
    bins = std::min(bins, 100000);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<HistogramBin> out(bins);
  for (int b = 0; b < bins; ++b) {
    out[b].lo = lo + span * b / bins;
    out[b].hi = lo + span * (b + 1) / bins;
  }
  for (double x : sorted) {
    int b = static_cast<int>((x - lo) / span * bins);
    b = std::min(std::max(b, 0), bins - 1);
    ++out[b].count;
  }
  for (auto& bin : out) {
    bin.density = static_cast<double>(bin.count) /
                  (static_cast<double>(n) * (bin.hi - bin.lo));
  }
  return out;
}

}  // namespace sinrkit
