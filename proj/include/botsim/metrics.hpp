#pragma once

// Ecosystem health metrics: average quality Q and diversity D over the human
// feed snapshot, Kendall tau-b between quality and popularity, a Lorenz/Gini
// measure of how concentrated low-quality content is in high-degree feeds,
// popularity tails, and the bot amplification exponent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "botsim/engine.hpp"
#include "botsim/feed.hpp"
#include "botsim/meme.hpp"
#include "botsim/network.hpp"

namespace botsim {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Q: mean quality over entries in human feeds. At steady state every feed is
// full and this equals the (1 / alpha N) sum of the formula; before that the
// mean over the entries actually present avoids a fill-level bias.
inline double average_quality(const std::vector<Feed>& feeds, std::size_t n_humans,
                              const MemeStore& memes) {
  double sum = 0.0;
  std::size_t entries = 0;
  for (std::size_t node = 0; node < n_humans; ++node) {
    const Feed& feed = feeds[node];
    for (std::size_t i = 0; i < feed.size(); ++i) {
      sum += memes[feed[i].meme].quality;
    }
    entries += feed.size();
  }
  if (entries == 0) return kMissing;
  return sum / static_cast<double>(entries);
}

// D: Shannon entropy (natural log) of the distribution of human-feed entries
// over distinct memes. Zero when a single meme fills every feed.
inline double diversity(const std::vector<Feed>& feeds, std::size_t n_humans) {
  std::unordered_map<MemeId, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (std::size_t node = 0; node < n_humans; ++node) {
    const Feed& feed = feeds[node];
    for (std::size_t i = 0; i < feed.size(); ++i) {
      ++counts[feed[i].meme];
      ++total;
    }
  }
  if (total == 0) return kMissing;
  double d = 0.0;
  for (const auto& [meme, count] : counts) {
    const double p = static_cast<double>(count) / static_cast<double>(total);
    d -= p * std::log(p);
  }
  return d;
}

namespace detail {

// Counts strict inversions of `values` (pairs i < j with values[i] >
// values[j]) by merge sort. Ties are not inversions.
inline std::int64_t count_inversions(std::vector<double>& values,
                                     std::vector<double>& scratch, std::size_t lo,
                                     std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(values, scratch, lo, mid) +
                     count_inversions(values, scratch, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (values[b] < values[a]) {
      inv += static_cast<std::int64_t>(mid - a);
      scratch[out++] = values[b++];
    } else {
      scratch[out++] = values[a++];
    }
  }
  while (a < mid) scratch[out++] = values[a++];
  while (b < hi) scratch[out++] = values[b++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return inv;
}

inline std::int64_t tie_pairs(std::int64_t group) { return group * (group - 1) / 2; }

}  // namespace detail

// Kendall tau-b with the standard tie correction:
// tau = (C - D) / sqrt((n0 - n1)(n0 - n2)) where n0 = n(n-1)/2 and n1, n2 are
// the within-tie pair counts of each variable. O(n log n) via merge-sort
// inversion counting; missing when every pair is tied in one variable.
inline double kendall_tau_b(std::vector<std::pair<double, double>> pairs) {
  const auto n = static_cast<std::int64_t>(pairs.size());
  if (n < 2) return kMissing;
  std::sort(pairs.begin(), pairs.end());

  const std::int64_t n0 = n * (n - 1) / 2;
  std::int64_t n1 = 0;  // pairs tied in the first variable
  std::int64_t n2 = 0;  // pairs tied in the second
  std::int64_t n3 = 0;  // pairs tied in both
  for (std::int64_t i = 0; i < n;) {
    std::int64_t j = i;
    while (j < n && pairs[j].first == pairs[i].first) ++j;
    n1 += detail::tie_pairs(j - i);
    for (std::int64_t a = i; a < j;) {
      std::int64_t b = a;
      while (b < j && pairs[b].second == pairs[a].second) ++b;
      n3 += detail::tie_pairs(b - a);
      a = b;
    }
    i = j;
  }

  std::vector<double> ys(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) ys[i] = pairs[i].second;
  {
    std::vector<double> sorted = ys;
    std::sort(sorted.begin(), sorted.end());
    for (std::int64_t i = 0; i < n;) {
      std::int64_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      n2 += detail::tie_pairs(j - i);
      i = j;
    }
  }

  // With the array sorted by (x, y), strict y-inversions are exactly the
  // discordant pairs: same-x groups are y-sorted and y-ties don't count.
  std::vector<double> scratch(ys.size());
  const std::int64_t discordant = detail::count_inversions(ys, scratch, 0, ys.size());
  const std::int64_t concordant = n0 - n1 - n2 + n3 - discordant;

  const double denom = static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2);
  if (denom <= 0.0) return kMissing;
  return static_cast<double>(concordant - discordant) / std::sqrt(denom);
}

// Lorenz-curve concentration of low-quality feed content in high in-degree
// nodes. Nodes sorted by in-degree ascending (node id breaks ties); g =
// 1 - 2 * area under the cumulative-share curve. Zero when every node holds
// the same amount; approaches 1 when the top hub holds everything.
inline double gini_concentration(const std::vector<std::pair<std::uint64_t, double>>& nodes) {
  if (nodes.size() < 2) return kMissing;
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nodes[a].first != nodes[b].first ? nodes[a].first < nodes[b].first : a < b;
  });
  double total = 0.0;
  for (const auto& [degree, count] : nodes) {
    if (count < 0.0) throw std::invalid_argument("gini_concentration: negative count");
    total += count;
  }
  if (total <= 0.0) return kMissing;

  const double n = static_cast<double>(nodes.size());
  double area = 0.0;
  double cum = 0.0;
  for (std::size_t i : order) {
    const double prev = cum;
    cum += nodes[i].second / total;
    area += (prev + cum) / (2.0 * n);  // trapezoid over one 1/n-wide strip
  }
  return 1.0 - 2.0 * area;
}

// The concrete instance used in reports: share of q = 0 entries per human
// feed against the human's follower count; input order supplies the id
// tie-break.
inline double gini_hub_concentration(const Network& net, const std::vector<Feed>& feeds,
                                     const MemeStore& memes) {
  std::vector<std::pair<std::uint64_t, double>> nodes;
  nodes.reserve(net.n_humans());
  for (NodeId node = 0; node < net.n_humans(); ++node) {
    const Feed& feed = feeds[node];
    double low = 0.0;
    for (std::size_t i = 0; i < feed.size(); ++i) {
      if (memes[feed[i].meme].quality == 0.0f) low += 1.0;
    }
    nodes.emplace_back(net.in_degree(node), low);
  }
  return gini_concentration(nodes);
}

// Human-post popularity samples from the ledger, split by the q = 0 / q > 0
// class. Only memes actually posted by humans during measurement carry a
// popularity; V_h = 0 rows are merely residents of feeds and are excluded.
inline std::vector<std::uint32_t> popularity_samples(const MemeLedger& ledger,
                                                     bool low_quality) {
  std::vector<std::uint32_t> out;
  for (const LedgerRow& row : ledger) {
    if (row.human_posts == 0) continue;
    const bool is_low = row.quality == 0.0f;
    if (is_low == low_quality) out.push_back(row.human_posts);
  }
  return out;
}

struct CcdfPoint {
  double popularity = 0.0;  // log-spaced threshold
  double prob = 0.0;        // P(V_h >= popularity)
};

// Complementary cumulative distribution on log-spaced thresholds (10 per
// decade), suitable for log-log plotting. Integer samples make fractional
// thresholds in the same unit interval redundant, so cuts are deduplicated.
inline std::vector<CcdfPoint> popularity_ccdf(std::vector<std::uint32_t> samples) {
  std::vector<CcdfPoint> out;
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double max_v = static_cast<double>(samples.back());
  const int last_bin = static_cast<int>(std::ceil(10.0 * std::log10(std::max(max_v, 1.0))));
  std::uint64_t prev_cut = 0;
  for (int b = 0; b <= last_bin; ++b) {
    const auto cut = static_cast<std::uint64_t>(
        std::ceil(std::pow(10.0, static_cast<double>(b) / 10.0)));
    if (cut > samples.back()) break;  // no empty tail past the largest sample
    if (cut == prev_cut) continue;
    prev_cut = cut;
    const auto first = std::lower_bound(samples.begin(), samples.end(), cut);
    out.push_back({static_cast<double>(cut),
                   static_cast<double>(samples.end() - first) / n});
  }
  return out;
}

struct AmplificationBin {
  double mean_vb = 0.0;  // bin center: mean bot volume of the bin's memes
  double mean_vh = 0.0;
  double eta = 0.0;      // log(mean_vh) / log(mean_vb)
  std::size_t count = 0;
};

struct AmplificationResult {
  std::vector<AmplificationBin> bins;
  double eta_hat = kMissing;  // least-squares exponent of V_h = V_b^eta
  std::size_t n_memes = 0;
};

// Power-law exponent of human vs bot post volume over q = 0 memes. Memes
// need V_b >= 2 and V_h >= 1 for the log ratio to be defined. Binning is
// log-spaced on V_b, 10 bins per decade; the aggregate slope is the
// through-origin least-squares fit of ln V_h on ln V_b, matching the
// prefactor-free power law.
inline AmplificationResult amplification_exponent(const MemeLedger& ledger) {
  AmplificationResult result;
  std::unordered_map<int, AmplificationBin> bins;
  double sxx = 0.0, sxy = 0.0;
  for (const LedgerRow& row : ledger) {
    if (row.quality != 0.0f || row.bot_posts < 2 || row.human_posts < 1) continue;
    ++result.n_memes;
    const double x = std::log(static_cast<double>(row.bot_posts));
    const double y = std::log(static_cast<double>(row.human_posts));
    sxx += x * x;
    sxy += x * y;
    const int bin = static_cast<int>(
        std::floor(10.0 * std::log10(static_cast<double>(row.bot_posts))));
    AmplificationBin& slot = bins[bin];
    slot.mean_vb += static_cast<double>(row.bot_posts);
    slot.mean_vh += static_cast<double>(row.human_posts);
    ++slot.count;
  }
  if (bins.size() < 2) return result;  // eta_hat stays missing

  result.eta_hat = sxy / sxx;
  for (auto& [bin, slot] : bins) {
    slot.mean_vb /= static_cast<double>(slot.count);
    slot.mean_vh /= static_cast<double>(slot.count);
    slot.eta = std::log(slot.mean_vh) / std::log(slot.mean_vb);
    result.bins.push_back(slot);
  }
  std::sort(result.bins.begin(), result.bins.end(),
            [](const auto& a, const auto& b) { return a.mean_vb < b.mean_vb; });
  return result;
}

struct MetricsReport {
  double Q = kMissing;
  double D = kMissing;
  double tau = kMissing;
  double gini_hub = kMissing;
  double eta = kMissing;
  std::size_t n_memes = 0;
  bool converged = false;
};

// Full per-run report from the end-of-run snapshot and the measurement
// ledger. tau correlates quality with human posts over human-origin memes.
inline MetricsReport compute_metrics(const RunResult& run, const Network& net) {
  MetricsReport report;
  report.Q = average_quality(run.state.feeds, net.n_humans(), run.state.memes);
  report.D = diversity(run.state.feeds, net.n_humans());
  std::vector<std::pair<double, double>> pairs;
  for (const LedgerRow& row : run.ledger) {
    if (row.origin != Origin::Human) continue;
    pairs.emplace_back(static_cast<double>(row.quality),
                       static_cast<double>(row.human_posts));
  }
  report.tau = kendall_tau_b(std::move(pairs));
  report.gini_hub = gini_hub_concentration(net, run.state.feeds, run.state.memes);
  report.eta = amplification_exponent(run.ledger).eta_hat;
  report.n_memes = run.ledger.size();
  report.converged = run.converged;
  return report;
}

}  // namespace botsim
