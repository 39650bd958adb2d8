#pragma once

// Weighted sampling without replacement (Efraimidis-Spirakis keys). Each
// draw is taken with probability proportional to the remaining weights.
// Zero-weight items are eligible only once every positive weight is
// exhausted, and are then picked uniformly at random.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "botsim/rng.hpp"

namespace botsim {

inline std::vector<std::uint32_t> weighted_sample_without_replacement(
    std::span<const double> weights, std::size_t m, Rng& rng) {
  const std::size_t n = weights.size();
  if (m > n) {
    throw std::invalid_argument("weighted sample: m exceeds population");
  }

  // One key per item, consumed in index order so the draw count is fixed.
  std::vector<std::pair<double, std::uint32_t>> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[i];
    if (w < 0.0 || !std::isfinite(w)) {
      throw std::invalid_argument("weighted sample: bad weight");
    }
    const double u = rng.uniform();
    const double key = w > 0.0 ? std::pow(u, 1.0 / w) : -u;
    keys[i] = {key, static_cast<std::uint32_t>(i)};
  }

  if (m < n) {
    std::nth_element(keys.begin(), keys.begin() + m, keys.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
  }

  std::vector<std::uint32_t> picked(m);
  for (std::size_t i = 0; i < m; ++i) picked[i] = keys[i].second;
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace botsim
