#pragma once

#include <cstdint>
#include <random>

namespace floodgen {

// Deterministic seed derivation. mix_seed(base, stream) gives independent
// per-stream seeds so parallel work is schedule-independent.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

// Quantile and CDF of the standard normal. The quantile uses the AS241
// rational approximations (double precision).
double inv_norm_cdf(double p);
double norm_cdf(double z);

// mt19937_64 with explicit value mappings. The standard pins the engine's
// output sequence but not the library distributions, so uniforms and
// normals are derived here to keep results reproducible everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t base, std::uint64_t stream) : eng_(mix_seed(base, stream)) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1), never exactly 0.
  double next_open01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n); rejection sampling.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via inverse-CDF (single draw consumed).
  double next_normal() { return inv_norm_cdf(next_open01()); }

private:
  std::mt19937_64 eng_;
};

}  // namespace floodgen
