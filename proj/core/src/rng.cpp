#include "hcprune/rng.hpp"

#include <cmath>

namespace hcprune {

namespace {

// splitmix64 step: advances x and returns the finalized output.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// splitmix64 finalizer on a fixed word, no state advance.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), draws_(0) {
  // seed and stream are each finalized separately, then combined into the
  // splitmix64 state that expands to the four xoshiro words.
  std::uint64_t sm = mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(stream + 0x3c6ef372fe94f82aULL);
  for (int i = 0; i < 4; ++i) state_[i] = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  ++draws_;
  return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open(double margin) {
  const double u = uniform01();
  if (u < margin) return margin;
  if (u > 1.0 - margin) return 1.0 - margin;
  return u;
}

double Rng::normal(double mean, double sd) {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(6.283185307179586 * u2);
}

Rng Rng::split(std::uint64_t key) const {
  return Rng(seed_ ^ mix64(key + 0x9e3779b97f4a7c15ULL), stream_ + 1);
}

}  // namespace hcprune
