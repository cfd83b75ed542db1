#pragma once

#include <cstdint>
#include <random>

namespace fairtopo {

// One step of the splitmix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for stream `stream` of a run seeded with `base`. Used to give every
// trial, graph and signal draw its own independent generator.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic generator. Only the engine's raw 64-bit output is used so the
// streams are identical across standard libraries (the std distributions are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  // Standard normal, Marsaglia polar method.
  double normal();
  // Chi-squared with k > 0 degrees of freedom.
  double chi_squared(double k);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fairtopo
