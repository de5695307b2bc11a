#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sinrkit/analytics.hpp"
#include "sinrkit/monte_carlo.hpp"

namespace sinrkit {

inline constexpr const char* kVersion = "0.1.0";

// All floating-point output is fixed to 17 significant digits so reruns of a
// manifest reproduce files byte-identically.
std::string format_double(double v);

std::string iso8601_utc_now();

void write_density_csv(const std::string& path, const DensityCurve& curve);

struct SumRateRow {
  double es_db = 0.0;
  double delta = 0.0;
  double rate_nats = 0.0;
  double rate_bits = 0.0;
  std::string method;
  double error_estimate = 0.0;
};

void write_sumrate_csv(const std::string& path,
                       const std::vector<SumRateRow>& rows);

void write_samples_csv(const std::string& path,
                       const std::vector<double>& samples);

void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins);

struct RunManifest {
  std::string command;      // the invocation, reconstructed from argv
  std::string config_json;  // fully resolved configuration, JSON text
  std::uint64_t seed = 0;
  int workers = 0;
  std::string version = kVersion;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

void write_verification_report(const std::string& path,
                               const VerificationReport& report,
                               const std::string& config_json);

std::string verification_report_json(const VerificationReport& report,
                                     const std::string& config_json);

}  // namespace sinrkit
