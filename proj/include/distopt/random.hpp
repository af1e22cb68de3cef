#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace distopt {

// SplitMix64 finalizer (Steele, Lea & Flood constants).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the per-class sampling stream for one iteration:
//   splitmix64(splitmix64(splitmix64(base) ^ iteration) ^ class_id)
// Part of the reproducibility contract; do not change.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t iteration, std::uint64_t class_id) {
  return splitmix64(splitmix64(splitmix64(base) ^ iteration) ^ class_id);
}

// Seed handed to the trainer for one iteration.
constexpr std::uint64_t trainer_seed(std::uint64_t base, std::uint64_t iteration) {
  return mix_seed(base, iteration, ~std::uint64_t{0});
}

// Deterministic generator on top of mt19937_64, whose output sequence is
// fixed by the standard. The distributions are implemented here instead of
// using <random>'s, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();

  // Uniform integer in [0, bound), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t hash_string(std::string_view text);

}  // namespace distopt
