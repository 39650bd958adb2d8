#pragma once

// Diffusion dynamics. Each step activates one agent uniformly at random;
// the agent posts a new meme with probability mu (always, if its feed is
// empty) or reshares a feed entry chosen proportionally to fitness. The
// message lands in every follower's bounded feed. The run first iterates to
// a steady state — window means of the alive-meme count and of the
// instantaneous average feed quality both stop moving — then keeps going for
// a measurement phase that fills the meme ledger.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "botsim/feed.hpp"
#include "botsim/meme.hpp"
#include "botsim/netgen.hpp"
#include "botsim/network.hpp"
#include "botsim/rng.hpp"

namespace botsim {

struct SteadyConfig {
  // Zero means "scaled default": window = 10 * nodes, max_steps = 500 * nodes.
  std::size_t window = 0;
  double rel_tol = 0.01;
  std::size_t consecutive = 3;
  std::size_t max_steps = 0;
};

struct SimParams {
  NetGenParams net;
  double mu = 0.75;      // information load: P(post new meme)
  std::size_t alpha = 15;  // feed capacity
  double phi = 1.0;      // deception
  SteadyConfig steady;
  std::size_t measure_steps = 0;  // zero: 50 * nodes

  void validate() const {
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("SimParams: mu outside [0,1]");
    if (alpha < 1) throw std::invalid_argument("SimParams: alpha must be >= 1");
    if (phi < 1.0) throw std::invalid_argument("SimParams: phi must be >= 1");
    if (steady.rel_tol <= 0.0 || steady.rel_tol >= 1.0) {
      throw std::invalid_argument("SimParams: rel_tol outside (0,1)");
    }
    if (steady.consecutive < 1) {
      throw std::invalid_argument("SimParams: consecutive must be >= 1");
    }
  }
};

struct LedgerRow {
  MemeId meme_id = 0;
  Origin origin = Origin::Human;
  float quality = 0.0f;
  float fitness = 0.0f;
  std::uint32_t human_posts = 0;       // post/repost events during measurement
  std::uint32_t bot_posts = 0;
  std::uint32_t feed_occurrences = 0;  // entries in human feeds at run end
};

using MemeLedger = std::vector<LedgerRow>;

struct SimState {
  std::vector<Feed> feeds;  // one per node, humans first
  MemeStore memes;
  std::vector<std::uint32_t> human_posts;  // cumulative, per meme
  std::vector<std::uint32_t> bot_posts;
  std::size_t alive_memes = 0;  // memes present in >= 1 feed
  std::uint64_t step = 0;
};

struct RunResult {
  SimState state;
  MemeLedger ledger;
  bool converged = false;
  std::uint64_t steps_to_steady = 0;
};

// Entry chosen with probability proportional to its meme's fitness;
// uniformly if every entry has fitness zero. Feed must be non-empty.
inline Message select_from_feed(const Feed& feed, const MemeStore& memes, Rng& rng) {
  if (feed.empty()) throw std::invalid_argument("select_from_feed: empty feed");
  double total = 0.0;
  for (std::size_t i = 0; i < feed.size(); ++i) {
    total += memes[feed[i].meme].fitness;
  }
  if (total <= 0.0) return feed[rng.index(feed.size())];
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < feed.size(); ++i) {
    acc += memes[feed[i].meme].fitness;
    if (target < acc) return feed[i];
  }
  return feed[feed.size() - 1];  // guard against rounding past the end
}

class Engine {
 public:
  Engine(const SimParams& params, const Network& net, Rng& rng)
      : params_(params), net_(net), rng_(rng) {
    params_.validate();
    state_.feeds.assign(net.size(), Feed(params_.alpha));
  }

  // One agent activation.
  void step() {
    const auto agent = static_cast<NodeId>(rng_.index(net_.size()));
    const bool wants_new = rng_.uniform() < params_.mu;
    const Feed& feed = state_.feeds[agent];

    MemeId meme;
    if (wants_new || feed.empty()) {
      const Origin origin =
          net_.kind(agent) == NodeKind::Bot ? Origin::Bot : Origin::Human;
      meme = state_.memes.create(origin, params_.phi, rng_);
      occ_all_.push_back(0);
      occ_human_.push_back(0);
      state_.human_posts.push_back(0);
      state_.bot_posts.push_back(0);
      observed_.push_back(0);
    } else {
      meme = select_from_feed(feed, state_.memes, rng_).meme;
    }

    const bool human_poster = net_.kind(agent) == NodeKind::Human;
    if (human_poster) {
      ++state_.human_posts[meme];
    } else {
      ++state_.bot_posts[meme];
    }
    if (measuring_ && human_poster) observed_[meme] = 1;

    const Message msg{meme, agent};
    for (NodeId follower : net_.followers(agent)) {
      push_to_feed(follower, msg);
    }
    ++state_.step;
  }

  RunResult run() {
    const std::size_t nodes = net_.size();
    const std::size_t window =
        params_.steady.window > 0 ? params_.steady.window : 10 * nodes;
    const std::size_t max_steps =
        params_.steady.max_steps > 0 ? params_.steady.max_steps : 500 * nodes;
    const std::size_t measure_steps =
        params_.measure_steps > 0 ? params_.measure_steps : 50 * nodes;
    if (window < nodes) {
      throw std::invalid_argument("Engine: steady window below node count");
    }

    // Steady-state search on the running means of the alive-meme count and
    // the instantaneous Q across completed windows. Adjacent window means
    // fluctuate by several percent at desk scale even deep in the stationary
    // regime, so they are compared through the running mean, whose step-to-
    // step change decays once the transient is over. Converged when both
    // running means move by less than rel_tol for `consecutive` windows in a
    // row.
    bool converged = false;
    double run_alive = 0.0, run_q = 0.0;
    std::size_t windows_done = 0;
    std::size_t streak = 0;
    std::uint64_t alive_accum = 0;
    double q_accum = 0.0;
    while (state_.step < max_steps) {
      step();
      alive_accum += state_.alive_memes;
      q_accum += instantaneous_quality();
      if (state_.step % window != 0) continue;

      const double mean_alive = static_cast<double>(alive_accum) / window;
      const double mean_q = q_accum / window;
      alive_accum = 0;
      q_accum = 0.0;
      const double k = static_cast<double>(++windows_done);
      const double new_alive = run_alive + (mean_alive - run_alive) / k;
      const double new_q = run_q + (mean_q - run_q) / k;
      if (windows_done > 1 &&
          rel_change(new_alive, run_alive) < params_.steady.rel_tol &&
          rel_change(new_q, run_q) < params_.steady.rel_tol) {
        ++streak;
      } else {
        streak = 0;
      }
      run_alive = new_alive;
      run_q = new_q;
      if (streak >= params_.steady.consecutive) {
        converged = true;
        break;
      }
    }

    RunResult result;
    result.converged = converged;
    result.steps_to_steady = state_.step;

    // Measurement phase: popularity counted from here on; a meme enters the
    // ledger if it sits in a human feed now, lands in one, or is posted by a
    // human before the run ends.
    baseline_human_ = state_.human_posts;
    baseline_bot_ = state_.bot_posts;
    for (MemeId m = 0; m < occ_human_.size(); ++m) {
      if (occ_human_[m] > 0) observed_[m] = 1;
    }
    measuring_ = true;
    for (std::size_t s = 0; s < measure_steps; ++s) step();

    result.ledger = build_ledger();
    result.state = std::move(state_);
    return result;
  }

  // Mean quality over current human feed entries (exact integer accumulator,
  // immune to float cancellation drift across millions of updates).
  double instantaneous_quality() const {
    if (human_entries_ == 0) return 0.0;
    return static_cast<double>(human_q_scaled_) /
           (kQualityScale * static_cast<double>(human_entries_));
  }

  std::size_t human_feed_entries() const { return human_entries_; }
  const SimState& state() const { return state_; }

 private:
  static constexpr double kQualityScale = 1073741824.0;  // 2^30

  static double rel_change(double a, double b) {
    const double scale = std::max(std::max(std::abs(a), std::abs(b)), 1e-12);
    return std::abs(a - b) / scale;
  }

  std::int64_t scaled_quality(MemeId m) const {
    return static_cast<std::int64_t>(
        static_cast<double>(state_.memes[m].quality) * kQualityScale);
  }

  void push_to_feed(NodeId follower, Message msg) {
    const bool human_feed = net_.kind(follower) == NodeKind::Human;
    const auto evicted = state_.feeds[follower].push(msg);
    if (evicted) {
      if (--occ_all_[evicted->meme] == 0) --state_.alive_memes;
      if (human_feed) {
        --occ_human_[evicted->meme];
        human_q_scaled_ -= scaled_quality(evicted->meme);
        --human_entries_;
      }
    }
    if (occ_all_[msg.meme]++ == 0) ++state_.alive_memes;
    if (human_feed) {
      ++occ_human_[msg.meme];
      human_q_scaled_ += scaled_quality(msg.meme);
      ++human_entries_;
      if (measuring_) observed_[msg.meme] = 1;
    }
  }

  MemeLedger build_ledger() const {
    MemeLedger ledger;
    for (MemeId m = 0; m < observed_.size(); ++m) {
      if (!observed_[m]) continue;
      const Meme& meme = state_.memes[m];
      LedgerRow row;
      row.meme_id = m;
      row.origin = meme.origin;
      row.quality = meme.quality;
      row.fitness = meme.fitness;
      row.human_posts = state_.human_posts[m] - baseline_at(baseline_human_, m);
      row.bot_posts = state_.bot_posts[m] - baseline_at(baseline_bot_, m);
      row.feed_occurrences = occ_human_[m];
      ledger.push_back(row);
    }
    return ledger;
  }

  static std::uint32_t baseline_at(const std::vector<std::uint32_t>& v, MemeId m) {
    return m < v.size() ? v[m] : 0;  // memes born during measurement
  }

  SimParams params_;
  const Network& net_;
  Rng& rng_;
  SimState state_;

  std::vector<std::uint32_t> occ_all_;    // feed entries per meme, all feeds
  std::vector<std::uint32_t> occ_human_;  // ... human feeds only
  std::vector<std::uint8_t> observed_;    // meme ever seen by the human network
  std::vector<std::uint32_t> baseline_human_;  // counters at measurement start
  std::vector<std::uint32_t> baseline_bot_;
  std::int64_t human_q_scaled_ = 0;
  std::size_t human_entries_ = 0;
  bool measuring_ = false;
};

// Builds the network from params.net with sub-seeds derived from `seed`, then
// runs the dynamics on a separate diffusion stream.
inline RunResult run_simulation(const SimParams& params, std::uint64_t seed) {
  const Network net = build_network(params.net, seed);
  Rng rng(derive_seed(seed, stream::diffusion));
  Engine engine(params, net, rng);
  return engine.run();
}

// Variant reusing an already-built network (targeting experiments share the
// human subnetwork across wiring strategies).
inline RunResult run_simulation(const SimParams& params, const Network& net,
                                std::uint64_t seed) {
  Rng rng(derive_seed(seed, stream::diffusion));
  Engine engine(params, net, rng);
  return engine.run();
}

}  // namespace botsim
