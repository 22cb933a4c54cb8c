#pragma once

#include <cstdint>

namespace beliefwin {

/// splitmix64 finalizer; used both as the PRNG step and for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Episode i of a batch draws from its own stream so that batches are
/// reproducible independent of scheduling:  seed_i = mix64(master ^ mix64(i+1)).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

/// Small deterministic PRNG (splitmix64 stream).  Not cryptographic; it only
/// has to be reproducible and unbiased enough for strategy randomisation and
/// Monte-Carlo estimation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw from [0, n) without modulo bias (Lemire reduction).
  std::uint32_t bounded(std::uint32_t n) {
    std::uint64_t x = next_u64() >> 32;
    std::uint64_t m = x * n;
    std::uint64_t l = m & 0xffffffffull;
    if (l < n) {
      std::uint64_t t = (0x100000000ull - n) % n;
      while (l < t) {
        x = next_u64() >> 32;
        m = x * n;
        l = m & 0xffffffffull;
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace beliefwin
