#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "botsim/rng.hpp"

using namespace botsim;

TEST_CASE("mix64 is a bijection on a sample and hits known constants") {
  // splitmix64 reference outputs for state 0, 1, 2 (the finalizer applied to
  // successive increments is exactly the splitmix64 sequence).
  CHECK(mix64(0) == 0xe220a8397b1dcdafULL);

  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100'000; ++i) seen.insert(mix64(i));
  CHECK(seen.size() == 100'000);
}

TEST_CASE("derive_seed is injective across streams and bases") {
  std::unordered_set<std::uint64_t> seen;
  constexpr std::uint64_t kStreams = 100'000;
  for (std::uint64_t s = 0; s < kStreams; ++s) seen.insert(derive_seed(42, s));
  REQUIRE(seen.size() == kStreams);

  // Different bases give unrelated children for the same stream.
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 5) != derive_seed(2, 5));

  // The named sub-streams are pairwise distinct under a common run seed.
  const std::uint64_t run = 7;
  std::unordered_set<std::uint64_t> subs{
      derive_seed(run, stream::human_net), derive_seed(run, stream::bot_net),
      derive_seed(run, stream::wiring), derive_seed(run, stream::diffusion)};
  CHECK(subs.size() == 4);
}

TEST_CASE("replicate_seed separates grid points and replicates") {
  constexpr std::uint64_t kReplicates = 20;
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t point = 0; point < 50; ++point) {
    for (std::uint64_t rep = 0; rep < kReplicates; ++rep) {
      seen.insert(replicate_seed(123, point * kReplicates + rep));
    }
  }
  CHECK(seen.size() == 50 * kReplicates);
}

TEST_CASE("uniform() is in [0,1) with the right mean and variance") {
  Rng rng(2024);
  constexpr std::size_t kDraws = 1'000'000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / kDraws;
  const double var = sumsq / kDraws - mean * mean;
  // 3 sigma of the sample mean: sqrt(1/12) / sqrt(n)
  CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / kDraws));
  CHECK(var == Catch::Approx(1.0 / 12.0).margin(0.001));
}

TEST_CASE("index(n) stays in range and is close to uniform") {
  Rng rng(99);
  constexpr std::uint64_t kBuckets = 7;
  constexpr std::size_t kDraws = 700'000;
  std::vector<std::size_t> counts(kBuckets, 0);
  for (std::size_t i = 0; i < kDraws; ++i) {
    const std::uint64_t k = rng.index(kBuckets);
    REQUIRE(k < kBuckets);
    ++counts[k];
  }
  const double expected = static_cast<double>(kDraws) / kBuckets;
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / kBuckets));
  for (std::size_t b = 0; b < kBuckets; ++b) {
    CHECK(std::abs(static_cast<double>(counts[b]) - expected) < 4.0 * sigma);
  }

  // n = 1 must always return 0 without consuming unbounded draws.
  for (int i = 0; i < 10; ++i) CHECK(rng.index(1) == 0);
}

TEST_CASE("bernoulli edge probabilities and law of large numbers") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
  constexpr std::size_t kDraws = 1'000'000;
  constexpr double p = 0.3;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < kDraws; ++i) hits += rng.bernoulli(p) ? 1 : 0;
  const double sigma = std::sqrt(p * (1.0 - p) / kDraws);
  CHECK(std::abs(static_cast<double>(hits) / kDraws - p) < 3.0 * sigma);
}

TEST_CASE("identical seeds give identical streams, distinct seeds diverge") {
  Rng a(31337), b(31337), c(31338);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.raw();
    all_equal = all_equal && va == b.raw();
    any_diff = any_diff || va != c.raw();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}
