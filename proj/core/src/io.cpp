#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "sinrkit/errors.hpp"
#include "sinrkit/io.hpp"

namespace sinrkit {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: stable line endings
  if (!out) {
    throw ConfigError("output: cannot open '" + path + "' for writing");
  }
  return out;
}

nlohmann::json report_to_json(const VerificationReport& rep,
                              const std::string& config_json) {
  nlohmann::json j;
  j["ks_distance"] = rep.ks_distance;
  j["ks_threshold"] = rep.ks_threshold;
  j["ks_pass"] = rep.ks_pass;
  j["l1_binned"] = rep.l1_binned;
  j["samples"] = rep.samples;
  j["rejected"] = rep.rejected;
  j["sufficient_samples"] = rep.sufficient_samples;
  j["note"] = rep.note;
  if (rep.sumrate_std_error >= 0.0) {
    j["sumrate_empirical"] = rep.sumrate_empirical;
    j["sumrate_analytic"] = rep.sumrate_analytic;
    j["sumrate_std_error"] = rep.sumrate_std_error;
    j["sumrate_pass"] = rep.sumrate_pass;
  }
  j["seed"] = rep.seed;
  j["pass"] = rep.pass();
  if (!config_json.empty()) {
    j["config"] = nlohmann::json::parse(config_json);
  }
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_density_csv(const std::string& path, const DensityCurve& curve) {
  auto out = open_output(path);
  out << "gamma,density,error_estimate\n";
  for (const auto& p : curve.points) {
    out << format_double(p.gamma) << ',' << format_double(p.density) << ','
        << format_double(p.error) << '\n';
  }
}

void write_sumrate_csv(const std::string& path,
                       const std::vector<SumRateRow>& rows) {
  auto out = open_output(path);
  out << "es_db,delta,rate_nats,rate_bits,method,error_estimate\n";
  for (const auto& r : rows) {
    out << format_double(r.es_db) << ',' << format_double(r.delta) << ','
        << format_double(r.rate_nats) << ',' << format_double(r.rate_bits)
        << ',' << r.method << ',' << format_double(r.error_estimate) << '\n';
  }
}

void write_samples_csv(const std::string& path,
                       const std::vector<double>& samples) {
  auto out = open_output(path);
  out << "sinr\n";
  for (double v : samples) out << format_double(v) << '\n';
}

void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins) {
  auto out = open_output(path);
  out << "bin_lo,bin_hi,density,count\n";
  for (const auto& b : bins) {
    out << format_double(b.lo) << ',' << format_double(b.hi) << ','
        << format_double(b.density) << ',' << b.count << '\n';
  }
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config_json.empty()
                    ? nlohmann::json::object()
                    : nlohmann::json::parse(manifest.config_json);
  j["seed"] = manifest.seed;
  j["workers"] = manifest.workers;
  j["version"] = manifest.version;
  j["started_utc"] = manifest.started_utc;
  j["finished_utc"] = manifest.finished_utc;
  j["outputs"] = manifest.outputs;
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

std::string verification_report_json(const VerificationReport& report,
                                     const std::string& config_json) {
  return report_to_json(report, config_json).dump(2);
}

void write_verification_report(const std::string& path,
                               const VerificationReport& report,
                               const std::string& config_json) {
  auto out = open_output(path);
  out << verification_report_json(report, config_json) << '\n';
}

}  // namespace sinrkit
