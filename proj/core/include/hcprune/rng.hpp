#pragma once

#include <cstdint>

namespace hcprune {

// Deterministic xoshiro256++ stream seeded through splitmix64. The integer
// sequence for a given (seed, stream) is bit-identical across platforms,
// which is what every reproducibility contract in this project rests on.
// `draws()` counts how many 64-bit outputs were consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static const char* algorithm() { return "splitmix64-seeded xoshiro256++"; }

  std::uint64_t next_u64();

  // 53-bit uniform in [0, 1).
  double uniform01();

  // Uniform clamped into [margin, 1-margin]; keeps logit(u) finite.
  double uniform_open(double margin);

  double normal(double mean = 0.0, double sd = 1.0);

  // Independent substream derived from (seed, key); does not advance *this.
  Rng split(std::uint64_t key) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_;
};

}  // namespace hcprune
