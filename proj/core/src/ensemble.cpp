#include "sinrkit/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sinrkit/errors.hpp"

namespace sinrkit {

using nlohmann::json;

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kGaussianProduct:
      return "gaussian_product";
    case EnsembleKind::kJacobiProduct:
      return "jacobi_product";
    case EnsembleKind::kGenericKernel:
      return "generic_kernel";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "gaussian_product" || s == "gaussian") {
    return EnsembleKind::kGaussianProduct;
  }
  if (s == "jacobi_product" || s == "jacobi") {
    return EnsembleKind::kJacobiProduct;
  }
  if (s == "generic_kernel" || s == "generic") {
    return EnsembleKind::kGenericKernel;
  }
  throw ConfigError("ensemble.kind: unknown value '" + s +
                    "' (expected gaussian_product, jacobi_product, or "
                    "generic_kernel)");
}

std::string to_string(Receiver r) {
  return r == Receiver::kZf ? "zf" : "mmse";
}

double interpolate_cubic(const KernelTabulation& table, double y) {
  const std::size_t n = table.y.size();
  if (n < 4 || table.value.size() != n) {
    throw ConfigError(
        "kernel tabulation: need >= 4 grid points and matching value count");
  }
  if (y < table.y.front() || y > table.y.back()) return 0.0;
  // Index of the last grid point <= y, clamped so the 4-point stencil
  // [i-1, i+2] stays inside the table.
  auto it = std::upper_bound(table.y.begin(), table.y.end(), y);
  std::size_t i = static_cast<std::size_t>(it - table.y.begin());
  i = std::min(std::max<std::size_t>(i, 2), n - 2) - 1;
  const std::size_t lo = i - 1;
  // Lagrange cubic through the four nodes.
  double acc = 0.0;
  for (std::size_t j = lo; j < lo + 4; ++j) {
    double w = table.value[j];
    for (std::size_t k = lo; k < lo + 4; ++k) {
      if (k == j) continue;
      w *= (y - table.y[k]) / (table.y[j] - table.y[k]);
    }
    acc += w;
  }
  return acc;
}

double resolve_delta(const ReceiverConfig& rc, double alpha, int n_t) {
  if (rc.delta.has_value()) {
    if (!(*rc.delta > 0.0)) {
      throw ConfigError("receiver.delta: must be positive");
    }
    return *rc.delta;
  }
  if (!(rc.es > 0.0)) {
    throw ConfigError("receiver.es: must be positive");
  }
  if (!(rc.n0 > 0.0)) {
    throw ConfigError("receiver.n0: must be positive");
  }
  return (rc.es / rc.n0) * alpha / static_cast<double>(n_t);
}

void validate(const EnsembleSpec& spec) {
  if (spec.n_t < 2) {
    throw ConfigError("ensemble.n_t: must be >= 2, got " +
                      std::to_string(spec.n_t));
  }
  if (spec.kind == EnsembleKind::kGenericKernel) {
    if (!spec.generic_kernel && spec.kernel_table_at_zero.empty()) {
      throw ConfigError(
          "ensemble.generic_kernel: the generic_kernel kind needs either a "
          "K(x, y) evaluator or a tabulation of K(0, .)");
    }
    auto check_table = [](const KernelTabulation& t, const std::string& name) {
      if (t.empty()) return;
      if (t.y.size() < 4) {
        throw ConfigError("ensemble." + name +
                          ": cubic interpolation needs >= 4 grid points");
      }
      if (t.value.size() != t.y.size()) {
        throw ConfigError("ensemble." + name + ": grid has " +
                          std::to_string(t.y.size()) + " points but " +
                          std::to_string(t.value.size()) + " values");
      }
      for (std::size_t i = 1; i < t.y.size(); ++i) {
        if (!(t.y[i] > t.y[i - 1])) {
          throw ConfigError("ensemble." + name + ".y[" + std::to_string(i) +
                            "]: grid must be strictly increasing");
        }
      }
    };
    check_table(spec.kernel_table_at_zero, "kernel_table_at_zero");
    check_table(spec.kernel_table_at_shift, "kernel_table_at_shift");
    if (!spec.kernel_table_at_shift.empty() && !(spec.kernel_shift_x < 0.0)) {
      throw ConfigError(
          "ensemble.kernel_shift_x: the shifted section is tabulated at "
          "x = -1/delta, which must be negative");
    }
    return;
  }
  if (spec.M < 1) {
    throw ConfigError("ensemble.M: must be >= 1, got " +
                      std::to_string(spec.M));
  }
  if (static_cast<int>(spec.nu.size()) != spec.M) {
    throw ConfigError("ensemble.nu: expected " + std::to_string(spec.M) +
                      " entries, got " + std::to_string(spec.nu.size()));
  }
  for (int j = 0; j < spec.M; ++j) {
    if (spec.nu[j] < 0) {
      throw ConfigError("ensemble.nu[" + std::to_string(j) +
                        "]: must be >= 0, got " + std::to_string(spec.nu[j]));
    }
  }
  if (spec.kind == EnsembleKind::kGaussianProduct) {
    if (!spec.mu.empty()) {
      throw ConfigError(
          "ensemble.mu: only the jacobi_product kind takes mu parameters");
    }
    return;
  }
  if (static_cast<int>(spec.mu.size()) != spec.M) {
    throw ConfigError("ensemble.mu: expected " + std::to_string(spec.M) +
                      " entries, got " + std::to_string(spec.mu.size()));
  }
  for (int j = 0; j < spec.M; ++j) {
    // mu[j] > nu[j] keeps the weight normalizable; mu[j] >= nu[j-1] keeps the
    // truncated-unitary factor dimensions feasible.
    const int prev = j == 0 ? 0 : spec.nu[j - 1];
    const int least = std::max(spec.nu[j] + 1, prev);
    if (spec.mu[j] < least) {
      throw ConfigError("ensemble.mu[" + std::to_string(j) +
                        "]: must be >= " + std::to_string(least) +
                        " (max of nu[" + std::to_string(j) + "]+1 and the "
                        "preceding rectangularity), got " +
                        std::to_string(spec.mu[j]));
    }
  }
}

void validate(const CorrelationSpec& corr, int n_t) {
  if (corr.is_identity()) return;
  if (corr.sigma_t.rows() != n_t || corr.sigma_t.cols() != n_t) {
    throw ConfigError("correlation.sigma_t: expected a " +
                      std::to_string(n_t) + "x" + std::to_string(n_t) +
                      " matrix, got " + std::to_string(corr.sigma_t.rows()) +
                      "x" + std::to_string(corr.sigma_t.cols()));
  }
  const double asym =
      (corr.sigma_t - corr.sigma_t.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw ConfigError(
        "correlation.sigma_t: matrix is not Hermitian (max asymmetry " +
        std::to_string(asym) + ")");
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(corr.sigma_t);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("correlation.sigma_t: matrix is not positive definite");
  }
}

std::vector<double> correlation_sigma_k(const CorrelationSpec& corr,
                                        int n_t) {
  std::vector<double> out(n_t, 1.0);
  if (corr.is_identity()) return out;
  validate(corr, n_t);
  ComplexMatrix inv = hermitian_inverse(corr.sigma_t);
  for (int k = 0; k < n_t; ++k) {
    out[k] = inv(k, k).real();
  }
  return out;
}

namespace {

ComplexMatrix matrix_from_json(const json& rows, const std::string& path) {
  if (!rows.is_array() || rows.empty()) {
    throw ConfigError(path + ": expected a non-empty array of rows");
  }
  const int n = static_cast<int>(rows.size());
  ComplexMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ConfigError(path + "[" + std::to_string(r) +
                        "]: expected a row of " + std::to_string(n) +
                        " entries");
    }
    for (int c = 0; c < n; ++c) {
      const json& e = row[c];
      if (e.is_number()) {
        m(r, c) = std::complex<double>(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() &&
                 e[1].is_number()) {
        m(r, c) =
            std::complex<double>(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(path + "[" + std::to_string(r) + "][" +
                          std::to_string(c) +
                          "]: expected a number or an [re, im] pair");
      }
    }
  }
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(row);
  }
  return rows;
}

json parse_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ConfigError(what + ": invalid JSON");
  }
  return j;
}

std::vector<int> int_list(const json& j, const std::string& path) {
  if (!j.is_array()) {
    throw ConfigError(path + ": expected an array of integers");
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) {
      throw ConfigError(path + "[" + std::to_string(i) +
                        "]: expected an integer");
    }
    out.push_back(j[i].get<int>());
  }
  return out;
}

}  // namespace

EnsembleSpec ensemble_from_json_text(const std::string& text) {
  json j = parse_text(text, "ensemble");
  if (!j.is_object()) {
    throw ConfigError("ensemble: expected a JSON object");
  }
  EnsembleSpec spec;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("ensemble.kind: required string field");
  }
  spec.kind = ensemble_kind_from_string(j["kind"].get<std::string>());
  if (spec.kind == EnsembleKind::kGenericKernel) {
    throw ConfigError(
        "ensemble.kind: generic_kernel ensembles are constructed "
        "programmatically, not from JSON");
  }
  if (!j.contains("n_t") || !j["n_t"].is_number_integer()) {
    throw ConfigError("ensemble.n_t: required integer field");
  }
  spec.n_t = j["n_t"].get<int>();
  if (!j.contains("nu")) {
    throw ConfigError("ensemble.nu: required field");
  }
  spec.nu = int_list(j["nu"], "ensemble.nu");
  spec.M = j.contains("M") && j["M"].is_number_integer()
               ? j["M"].get<int>()
               : static_cast<int>(spec.nu.size());
  if (j.contains("mu")) {
    spec.mu = int_list(j["mu"], "ensemble.mu");
  }
  validate(spec);
  return spec;
}

EnsembleSpec ensemble_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("ensemble: cannot open file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return ensemble_from_json_text(buf.str());
}

CorrelationSpec correlation_from_json_text(const std::string& text) {
  json j = parse_text(text, "correlation");
  CorrelationSpec corr;
  if (j.is_object() && j.contains("sigma_t")) {
    corr.sigma_t = matrix_from_json(j["sigma_t"], "correlation.sigma_t");
  } else if (j.is_array()) {
    corr.sigma_t = matrix_from_json(j, "correlation.sigma_t");
  } else {
    throw ConfigError(
        "correlation: expected a matrix or an object with a sigma_t field");
  }
  return corr;
}

CorrelationSpec correlation_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("correlation: cannot open file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return correlation_from_json_text(buf.str());
}

std::string ensemble_to_json_text(const EnsembleSpec& spec,
                                  const CorrelationSpec& corr) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["n_t"] = spec.n_t;
  if (spec.is_product()) {
    j["M"] = spec.M;
    j["nu"] = spec.nu;
    if (spec.kind == EnsembleKind::kJacobiProduct) {
      j["mu"] = spec.mu;
    }
  }
  if (!corr.is_identity()) {
    j["sigma_t"] = matrix_to_json(corr.sigma_t);
  }
  return j.dump(2);
}

}  // namespace sinrkit
