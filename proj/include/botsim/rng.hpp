#pragma once

// Deterministic random number generation. Every run owns an independent
// stream derived from (base seed, task index) through a fixed, documented
// rule, so sweeps are reproducible regardless of scheduling.

#include <cassert>
#include <cstdint>
#include <random>

namespace botsim {

// splitmix64 finalizer; a bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for stream `stream` under `base`. Injective in `stream` for a
// fixed base because mix64 is a bijection, so no two streams coincide.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return mix64(mix64(base) ^ mix64(stream + 0x6a09e667f3bcc909ULL));
}

// Seed of replicate k at sweep grid point g: derive_seed(base, g * R + k)
// where R is the replicate count. Standalone replicate sets use g = 0.
constexpr std::uint64_t replicate_seed(std::uint64_t base_seed,
                                       std::uint64_t task_index) noexcept {
  return derive_seed(base_seed, task_index);
}

// Per-run sub-streams, derived from the run seed.
namespace stream {
constexpr std::uint64_t human_net = 1;
constexpr std::uint64_t bot_net = 2;
constexpr std::uint64_t wiring = 3;
constexpr std::uint64_t diffusion = 4;
}  // namespace stream

// mt19937_64 behind a thin interface. Distribution helpers are hand-rolled
// (std::uniform_* are not specified bit-exactly across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t index(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t bound = n * (~std::uint64_t{0} / n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= bound);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace botsim
