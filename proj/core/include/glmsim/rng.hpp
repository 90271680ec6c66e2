#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace glmsim {

// Seeded generator with platform-independent variate transforms. The engine is
// std::mt19937_64, whose output sequence is fixed by the standard; the std::
// distributions are avoided because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang, with the u^(1/a) boost for shape < 1.
  double gamma(double shape);
  // log of a Gamma(shape, 1) draw; stays finite for tiny shapes where gamma() underflows.
  double log_gamma(double shape);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Stable 64-bit hash of a seed and a descriptor string (FNV-1a folded through mix64).
std::uint64_t stable_hash(std::uint64_t seed, std::string_view descriptor) noexcept;

}  // namespace glmsim
