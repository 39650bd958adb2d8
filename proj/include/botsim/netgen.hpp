#pragma once

// Network generation: random-walk growth for the human and bot subnetworks,
// bot infiltration wiring (random or targeting high in-degree humans), and
// the robustness variants (dead-end rewiring, preferential attachment, and
// an undirected preferential-attachment generator).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "botsim/network.hpp"
#include "botsim/rng.hpp"
#include "botsim/sampling.hpp"

namespace botsim {

enum class Wiring : std::uint8_t { Random, Preferential };

enum class Generator : std::uint8_t { RandomWalk, PreferentialAttachment, UndirectedPA };

struct NetGenParams {
  std::size_t n_humans = 10000;
  double beta = 0.1;              // bot subnetwork size ratio
  std::size_t k_out = 3;          // out-degree of each non-seed node
  double p = 0.5;                 // link-copy probability of the growth model
  double gamma = 0.0;             // infiltration: P(human follows a given bot)
  Wiring wiring = Wiring::Random;
  Generator generator = Generator::RandomWalk;
  bool rewire_dead_ends = false;
  std::size_t mean_degree = 20;   // undirected PA variant only

  std::size_t n_bots() const {
    return static_cast<std::size_t>(std::lround(beta * static_cast<double>(n_humans)));
  }
};

struct rewiring_infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Fully connects the first `seed` nodes (every ordered pair).
inline void add_seed_clique(Network& net, std::size_t seed) {
  for (NodeId a = 0; a < seed; ++a) {
    for (NodeId b = 0; b < seed; ++b) {
      if (a != b) net.add_link(a, b);
    }
  }
}

// Uniformly random friend that keeps out-degree growth valid, used when
// repeated candidate draws keep hitting self-links or duplicates.
inline bool fallback_friend(const Network& net, NodeId node, std::size_t existing,
                            Rng& rng, NodeId& out) {
  std::vector<NodeId> open;
  for (NodeId c = 0; c < existing; ++c) {
    if (c != node && !net.has_link(node, c)) open.push_back(c);
  }
  if (open.empty()) return false;
  out = open[rng.index(open.size())];
  return true;
}

constexpr int kCandidateAttempts = 100;

}  // namespace detail

// Directed random-walk growth. Starts from four fully connected nodes; each
// new node i follows one random existing node j, then fills its remaining
// out-links by following a random friend of j's with probability p (link
// copying, which closes directed triads) and a random existing node
// otherwise. Candidates that would duplicate a link or self-link are
// redrawn; if the node joins before k_out distinct targets exist, it takes
// every target available.
inline Network grow_rw_subnetwork(std::size_t n, std::size_t k_out, double p, Rng& rng) {
  if (n < 4) throw std::invalid_argument("grow_rw_subnetwork: need n >= 4");
  if (k_out < 1 || k_out >= n) {
    throw std::invalid_argument("grow_rw_subnetwork: need 1 <= k_out < n");
  }
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("grow_rw_subnetwork: p outside [0,1]");
  }

  Network net(n, 0);
  detail::add_seed_clique(net, 4);

  for (NodeId node = 4; node < n; ++node) {
    const std::size_t existing = node;
    const NodeId first = static_cast<NodeId>(rng.index(existing));
    net.add_link(node, first);

    const std::size_t want = std::min(k_out, existing) - 1;
    for (std::size_t added = 0; added < want; ++added) {
      NodeId pick = 0;
      bool found = false;
      for (int attempt = 0; attempt < detail::kCandidateAttempts; ++attempt) {
        const bool copy = rng.uniform() < p;
        NodeId candidate;
        if (copy && net.out_degree(first) > 0) {
          const auto& friends = net.following(first);
          candidate = friends[rng.index(friends.size())];
        } else {
          candidate = static_cast<NodeId>(rng.index(existing));
        }
        if (candidate != node && !net.has_link(node, candidate)) {
          pick = candidate;
          found = true;
          break;
        }
      }
      if (!found && !detail::fallback_friend(net, node, existing, rng, pick)) break;
      net.add_link(node, pick);
    }
  }
  return net;
}

// Directed preferential attachment: same skeleton as the random-walk model
// but every friend is drawn with probability proportional to in-degree + 1
// (the +1 keeps nodes nobody follows reachable). Produces the hubs without
// the clustering.
inline Network grow_pa_subnetwork(std::size_t n, std::size_t k_out, Rng& rng) {
  if (n < 4) throw std::invalid_argument("grow_pa_subnetwork: need n >= 4");
  if (k_out < 1 || k_out >= n) {
    throw std::invalid_argument("grow_pa_subnetwork: need 1 <= k_out < n");
  }

  Network net(n, 0);
  // Target pool realizes in_degree + 1 weights: one entry per node plus one
  // per incoming link.
  std::vector<NodeId> pool;
  pool.reserve(4 + n * (k_out + 1));
  for (NodeId s = 0; s < 4; ++s) pool.push_back(s);
  detail::add_seed_clique(net, 4);
  for (NodeId a = 0; a < 4; ++a) {
    for (NodeId b = 0; b < 4; ++b) {
      if (a != b) pool.push_back(b);
    }
  }

  for (NodeId node = 4; node < n; ++node) {
    const std::size_t existing = node;
    const std::size_t want = std::min(k_out, existing);
    std::vector<NodeId> picked;
    picked.reserve(want);
    for (std::size_t added = 0; added < want; ++added) {
      NodeId pick = 0;
      bool found = false;
      for (int attempt = 0; attempt < detail::kCandidateAttempts; ++attempt) {
        const NodeId candidate = pool[rng.index(pool.size())];
        if (candidate != node && !net.has_link(node, candidate)) {
          pick = candidate;
          found = true;
          break;
        }
      }
      if (!found && !detail::fallback_friend(net, node, existing, rng, pick)) break;
      net.add_link(node, pick);
      picked.push_back(pick);
    }
    pool.push_back(node);
    pool.insert(pool.end(), picked.begin(), picked.end());
  }
  return net;
}

// Undirected preferential attachment (the no-bot variant). Each new node
// attaches m = mean_degree / 2 undirected edges to existing nodes chosen
// proportionally to degree; every edge is stored as two reciprocal directed
// links, so out-degree equals the undirected degree.
inline Network grow_undirected_pa(std::size_t n, std::size_t mean_degree, Rng& rng) {
  if (mean_degree < 2 || mean_degree % 2 != 0) {
    throw std::invalid_argument("grow_undirected_pa: mean_degree must be even and >= 2");
  }
  const std::size_t m = mean_degree / 2;
  if (n <= m) throw std::invalid_argument("grow_undirected_pa: need n > mean_degree/2");

  const std::size_t seed = std::max<std::size_t>(2, m);
  Network net(n, 0);
  std::vector<NodeId> pool;  // one entry per edge endpoint
  for (NodeId a = 0; a < seed; ++a) {
    for (NodeId b = static_cast<NodeId>(a + 1); b < seed; ++b) {
      net.add_link(a, b);
      net.add_link(b, a);
      pool.push_back(a);
      pool.push_back(b);
    }
  }

  for (NodeId node = static_cast<NodeId>(seed); node < n; ++node) {
    const std::size_t want = std::min(m, static_cast<std::size_t>(node));
    std::vector<NodeId> picked;
    picked.reserve(want);
    for (std::size_t added = 0; added < want; ++added) {
      NodeId pick = 0;
      bool found = false;
      for (int attempt = 0; attempt < detail::kCandidateAttempts; ++attempt) {
        const NodeId candidate = pool[rng.index(pool.size())];
        if (candidate != node && !net.has_link(node, candidate)) {
          pick = candidate;
          found = true;
          break;
        }
      }
      if (!found && !detail::fallback_friend(net, node, node, rng, pick)) break;
      net.add_link(node, pick);
      net.add_link(pick, node);
      picked.push_back(pick);
    }
    for (NodeId friend_node : picked) {
      pool.push_back(node);
      pool.push_back(friend_node);
    }
  }
  return net;
}

// Gives every node with no followers one: pick a node j with more than two
// followers, pick one of j's followers, and redirect that follower's link
// toward the orphaned node. Total in- and out-degree are unchanged.
inline Network rewire_dead_ends(Network net, Rng& rng) {
  const std::size_t n = net.size();
  for (NodeId node = 0; node < n; ++node) {
    if (net.in_degree(node) > 0) continue;

    std::vector<NodeId> donors;
    for (NodeId j = 0; j < n; ++j) {
      if (net.in_degree(j) > 2) donors.push_back(j);
    }
    if (donors.empty()) {
      throw rewiring_infeasible("rewire_dead_ends: no node with in-degree > 2");
    }

    bool done = false;
    for (int attempt = 0; attempt < detail::kCandidateAttempts && !done; ++attempt) {
      const NodeId donor = donors[rng.index(donors.size())];
      const auto& ins = net.followers(donor);
      const NodeId mover = ins[rng.index(ins.size())];
      if (mover == node || net.has_link(mover, node)) continue;
      net.replace_link(mover, donor, node);
      done = true;
    }
    if (!done) {
      throw rewiring_infeasible("rewire_dead_ends: no valid rewiring found");
    }
  }
  return net;
}

// Adds a link from each human to each bot independently with probability
// gamma. Never touches intra-subnetwork links.
inline Network infiltrate_random(Network net, double gamma, Rng& rng) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("infiltrate_random: gamma outside [0,1]");
  }
  const std::size_t n = net.n_humans();
  const std::size_t b = net.n_bots();
  if (gamma == 0.0 || b == 0) return net;
  for (NodeId human = 0; human < n; ++human) {
    for (NodeId bot = static_cast<NodeId>(n); bot < n + b; ++bot) {
      if (rng.uniform() < gamma) net.add_link(human, bot);
    }
  }
  return net;
}

// Preferential targeting: each bot acquires round(gamma * N) distinct human
// followers, drawn without replacement with weight equal to the human's
// follower count. Humans nobody follows become eligible only when every
// followed human is taken. Falls back to uniform weights if no human has a
// follower.
inline Network infiltrate_preferential(Network net, double gamma, Rng& rng) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("infiltrate_preferential: gamma outside [0,1]");
  }
  const std::size_t n = net.n_humans();
  const std::size_t b = net.n_bots();
  const auto per_bot =
      static_cast<std::size_t>(std::lround(gamma * static_cast<double>(n)));
  if (per_bot > n) {
    throw std::invalid_argument("infiltrate_preferential: round(gamma*N) > N");
  }
  if (per_bot == 0 || b == 0) return net;

  // Weights are the pre-infiltration follower counts; infiltration links all
  // point at bots, so human in-degrees are not perturbed by earlier bots.
  std::vector<double> weights(n);
  bool any_positive = false;
  for (NodeId human = 0; human < n; ++human) {
    weights[human] = static_cast<double>(net.in_degree(human));
    any_positive = any_positive || weights[human] > 0.0;
  }
  if (!any_positive) std::fill(weights.begin(), weights.end(), 1.0);

  for (NodeId bot = static_cast<NodeId>(n); bot < n + b; ++bot) {
    const auto picked = weighted_sample_without_replacement(weights, per_bot, rng);
    for (NodeId human : picked) net.add_link(human, bot);
  }
  return net;
}

namespace detail {

inline Network grow_subnetwork(const NetGenParams& params, std::size_t n, Rng& rng) {
  switch (params.generator) {
    case Generator::RandomWalk:
      return grow_rw_subnetwork(n, params.k_out, params.p, rng);
    case Generator::PreferentialAttachment:
      return grow_pa_subnetwork(n, params.k_out, rng);
    case Generator::UndirectedPA:
      return grow_undirected_pa(n, params.mean_degree, rng);
  }
  throw std::invalid_argument("grow_subnetwork: unknown generator");
}

inline bool growth_feasible(const NetGenParams& params, std::size_t n) {
  if (params.generator == Generator::UndirectedPA) {
    return n > params.mean_degree / 2;
  }
  return n >= 4 && n > params.k_out;
}

}  // namespace detail

// Full pipeline: grow the human subnetwork, grow the bot subnetwork with the
// same generator and parameters, optionally rewire dead ends within each, and
// wire the infiltration links. Sub-streams are derived from `seed` so the
// human subnetwork is identical across beta and wiring choices.
inline Network build_network(const NetGenParams& params, std::uint64_t seed) {
  const std::size_t n = params.n_humans;
  const std::size_t b = params.n_bots();
  if (params.beta < 0.0) throw std::invalid_argument("build_network: beta < 0");

  Rng human_rng(derive_seed(seed, stream::human_net));
  Network human = detail::grow_subnetwork(params, n, human_rng);
  if (params.rewire_dead_ends) {
    human = rewire_dead_ends(std::move(human), human_rng);
  }

  Network net(n, b);
  for (NodeId follower = 0; follower < n; ++follower) {
    for (NodeId friend_node : human.following(follower)) {
      net.add_link(follower, friend_node);
    }
  }

  if (b > 0) {
    const auto offset = static_cast<NodeId>(n);
    if (detail::growth_feasible(params, b)) {
      Rng bot_rng(derive_seed(seed, stream::bot_net));
      Network bots = detail::grow_subnetwork(params, b, bot_rng);
      if (params.rewire_dead_ends) {
        bots = rewire_dead_ends(std::move(bots), bot_rng);
      }
      for (NodeId follower = 0; follower < b; ++follower) {
        for (NodeId friend_node : bots.following(follower)) {
          net.add_link(offset + follower, offset + friend_node);
        }
      }
    } else {
      // Too few bots for the growth model; fall back to a full clique.
      for (NodeId x = 0; x < b; ++x) {
        for (NodeId y = 0; y < b; ++y) {
          if (x != y) net.add_link(offset + x, offset + y);
        }
      }
    }

    Rng wire_rng(derive_seed(seed, stream::wiring));
    net = params.wiring == Wiring::Preferential
              ? infiltrate_preferential(std::move(net), params.gamma, wire_rng)
              : infiltrate_random(std::move(net), params.gamma, wire_rng);
  }
  return net;
}

}  // namespace botsim
