#pragma once

#include <cstdint>
#include <string_view>

namespace gabm {

// Deterministic, platform-independent generator. std:: distributions are
// implementation-defined, so everything that feeds reproducible output
// (plans, synthetic agents, bootstrap resampling) goes through this.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform integer in [0, bound). Rejection sampled, unbiased.
  uint64_t uniform_below(uint64_t bound);

  // Standard normal via Box-Muller (fixed two-draw consumption).
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  uint64_t state_;
};

// Splittable seed derivation: a pure hash of (master, key, index).
// Identical inputs give identical seeds on every platform, so runs are
// resumable and independent of execution order.
uint64_t derive_seed(uint64_t master, std::string_view key, uint64_t index);

// FNV-1a over a byte string, finalized with an avalanche mix.
uint64_t hash64(std::string_view bytes);

}  // namespace gabm
