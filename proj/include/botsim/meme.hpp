#pragma once

// Memes and their fitness/quality model. Fitness f in [0,1] drives sharing
// decisions; quality q is what the suppression metrics score. Human memes
// have q = f drawn from a distribution that concentrates near 0 as the
// deception parameter phi grows, bot memes have q = 0 with fitness drawn
// from the mirrored distribution that concentrates near 1.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "botsim/rng.hpp"

namespace botsim {

using MemeId = std::uint32_t;

enum class Origin : std::uint8_t { Human, Bot };

// Inverse CDF of the human fitness density (1 + phi) * (1 - f)^phi, i.e. the
// inversion of F(f) = 1 - (1 - f)^(phi + 1). Mean of the density is
// 1 / (phi + 2).
inline double human_fitness_icdf(double phi, double u) {
  return 1.0 - std::pow(1.0 - u, 1.0 / (phi + 1.0));
}

// Inverse CDF of the bot fitness density (1 + 1/phi) * (1 - f)^(1/phi); the
// mirror image of the human density around its phi = 1 fixed point. Mean is
// phi / (2 phi + 1).
inline double bot_fitness_icdf(double phi, double u) {
  if (phi <= 0.0) throw std::invalid_argument("bot_fitness_icdf: phi <= 0");
  return 1.0 - std::pow(1.0 - u, phi / (phi + 1.0));
}

inline double sample_human_fitness(double phi, Rng& rng) {
  return human_fitness_icdf(phi, rng.uniform());
}

inline double sample_bot_fitness(double phi, Rng& rng) {
  return bot_fitness_icdf(phi, rng.uniform());
}

struct Meme {
  float fitness = 0.0f;
  float quality = 0.0f;
  Origin origin = Origin::Human;
};

// Append-only meme table; MemeId is the index.
class MemeStore {
 public:
  MemeId create(Origin origin, double phi, Rng& rng) {
    Meme meme;
    meme.origin = origin;
    if (origin == Origin::Human) {
      meme.fitness = static_cast<float>(sample_human_fitness(phi, rng));
      meme.quality = meme.fitness;
    } else {
      meme.fitness = static_cast<float>(sample_bot_fitness(phi, rng));
      meme.quality = 0.0f;
    }
    memes_.push_back(meme);
    return static_cast<MemeId>(memes_.size() - 1);
  }

  const Meme& operator[](MemeId id) const { return memes_[id]; }
  std::size_t size() const { return memes_.size(); }

 private:
  std::vector<Meme> memes_;
};

}  // namespace botsim
