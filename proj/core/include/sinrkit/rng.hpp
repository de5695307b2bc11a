#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace sinrkit {

// Deterministic random stream. mt19937_64 has a standardized output sequence,
// and the uniform/normal transforms below are spelled out explicitly, so a
// given (seed, draw order) produces identical doubles on every platform.
// std::uniform_real_distribution / std::normal_distribution are deliberately
// avoided: their algorithms are implementation-defined.
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Draws two uniforms per pair; the spare
  // is cached so scalar and pairwise call patterns consume the same stream.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // log(0) guard; probability 2^-53
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // CN(0,1): complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.70710678118654752440, im * 0.70710678118654752440};
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// splitmix64 step, used to derive statistically independent worker substreams
// from a master seed. Fixed algorithm, so substream seeds are reproducible.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline RngState substream(std::uint64_t master, std::uint64_t worker_index) {
  return RngState(mix_seed(master, worker_index));
}

}  // namespace sinrkit
