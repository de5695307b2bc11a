#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace sinrkit {

// Finite combination sum_i c_i * x^{N_i} * (ln x)^{k_i} with integer N_i and
// k_i >= 0. Closed under differentiation and multiplication by integer powers,
// which is exactly what the truncated-unitary weight functions and their
// kernel derivatives need. Valid for x > 0.
struct PolyLogTerm {
  int power = 0;
  int logpow = 0;
  double coeff = 0.0;
};

class PolyLogSeries {
 public:
  PolyLogSeries() = default;
  explicit PolyLogSeries(std::vector<PolyLogTerm> terms)
      : terms_(std::move(terms)) {
    merge();
  }

  const std::vector<PolyLogTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double eval(double x) const {
    const double lx = std::log(x);
    double acc = 0.0;
    for (const auto& t : terms_) {
      double v = t.coeff * std::pow(x, t.power);
      for (int k = 0; k < t.logpow; ++k) v *= lx;
      acc += v;
    }
    return acc;
  }

  // d/dx of each term: c x^N ln^k -> c N x^{N-1} ln^k + c k x^{N-1} ln^{k-1}.
  PolyLogSeries derivative() const {
    std::vector<PolyLogTerm> out;
    out.reserve(2 * terms_.size());
    for (const auto& t : terms_) {
      if (t.power != 0) {
        out.push_back({t.power - 1, t.logpow, t.coeff * t.power});
      }
      if (t.logpow > 0) {
        out.push_back({t.power - 1, t.logpow - 1, t.coeff * t.logpow});
      }
    }
    return PolyLogSeries(std::move(out));
  }

  PolyLogSeries derivative(int order) const {
    PolyLogSeries d = *this;
    for (int i = 0; i < order; ++i) d = d.derivative();
    return d;
  }

  PolyLogSeries times_power(int j) const {
    std::vector<PolyLogTerm> out = terms_;
    for (auto& t : out) t.power += j;
    return PolyLogSeries(std::move(out));
  }

  PolyLogSeries scaled(double c) const {
    std::vector<PolyLogTerm> out = terms_;
    for (auto& t : out) t.coeff *= c;
    return PolyLogSeries(std::move(out));
  }

  PolyLogSeries plus(const PolyLogSeries& other) const {
    std::vector<PolyLogTerm> out = terms_;
    out.insert(out.end(), other.terms_.begin(), other.terms_.end());
    return PolyLogSeries(std::move(out));
  }

  // ln(1) = 0, so only log-free terms survive at x = 1.
  double value_at_1() const {
    double acc = 0.0;
    for (const auto& t : terms_) {
      if (t.logpow == 0) acc += t.coeff;
    }
    return acc;
  }

  int min_power() const {
    int m = 0;
    bool first = true;
    for (const auto& t : terms_) {
      m = first ? t.power : std::min(m, t.power);
      first = false;
    }
    return m;
  }

 private:
  void merge() {
    std::map<std::pair<int, int>, double> acc;
    for (const auto& t : terms_) {
      acc[{t.power, t.logpow}] += t.coeff;
    }
    terms_.clear();
    for (const auto& [key, c] : acc) {
      if (c != 0.0) {
        terms_.push_back({key.first, key.second, c});
      }
    }
  }

  std::vector<PolyLogTerm> terms_;
};

}  // namespace sinrkit
