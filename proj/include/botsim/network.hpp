#pragma once

// Directed follower graph over human and bot accounts. A link points from
// the follower to the followed (friend) account; information travels the
// other way, friend -> follower. Humans occupy indices [0, n_humans) and
// bots [n_humans, n_humans + n_bots), so node kind is derived from the index.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace botsim {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Human, Bot };

class Network {
 public:
  Network() = default;

  Network(std::size_t n_humans, std::size_t n_bots)
      : following_(n_humans + n_bots),
        followers_(n_humans + n_bots),
        n_humans_(n_humans) {}

  static Network from_edges(std::size_t n_humans, std::size_t n_bots,
                            std::span<const std::pair<NodeId, NodeId>> edges) {
    Network net(n_humans, n_bots);
    for (const auto& [follower, friend_node] : edges) {
      net.add_link(follower, friend_node);
    }
    return net;
  }

  std::size_t size() const { return following_.size(); }
  std::size_t n_humans() const { return n_humans_; }
  std::size_t n_bots() const { return following_.size() - n_humans_; }

  NodeKind kind(NodeId id) const {
    return id < n_humans_ ? NodeKind::Human : NodeKind::Bot;
  }

  // Adds follower -> friend. Rejects self-links and duplicates.
  void add_link(NodeId follower, NodeId friend_node) {
    if (follower == friend_node) {
      throw std::invalid_argument("network: self-link rejected");
    }
    if (follower >= size() || friend_node >= size()) {
      throw std::invalid_argument("network: node id out of range");
    }
    if (has_link(follower, friend_node)) {
      throw std::invalid_argument("network: duplicate link rejected");
    }
    following_[follower].push_back(friend_node);
    followers_[friend_node].push_back(follower);
  }

  bool has_link(NodeId follower, NodeId friend_node) const {
    const auto& out = following_[follower];
    return std::find(out.begin(), out.end(), friend_node) != out.end();
  }

  // Redirects follower's link old_friend -> new_friend, keeping degree sums.
  void replace_link(NodeId follower, NodeId old_friend, NodeId new_friend) {
    if (follower == new_friend || has_link(follower, new_friend)) {
      throw std::invalid_argument("network: replace_link target invalid");
    }
    auto& out = following_[follower];
    auto it = std::find(out.begin(), out.end(), old_friend);
    if (it == out.end()) {
      throw std::invalid_argument("network: replace_link missing link");
    }
    *it = new_friend;
    auto& ins = followers_[old_friend];
    ins.erase(std::find(ins.begin(), ins.end(), follower));
    followers_[new_friend].push_back(follower);
  }

  // Friends this node follows (attention flows along these links).
  const std::vector<NodeId>& following(NodeId id) const { return following_[id]; }

  // Accounts following this node (posts propagate to these feeds).
  const std::vector<NodeId>& followers(NodeId id) const { return followers_[id]; }

  std::size_t out_degree(NodeId id) const { return following_[id].size(); }
  std::size_t in_degree(NodeId id) const { return followers_[id].size(); }

  std::size_t link_count() const {
    std::size_t total = 0;
    for (const auto& out : following_) total += out.size();
    return total;
  }

  // Edge-list dump: header line, then one follower<TAB>friend pair per line.
  void dump_edge_list(std::ostream& os) const {
    os << "# nodes=" << size() << " humans=" << n_humans_ << " bots=" << n_bots()
       << "\n";
    for (NodeId follower = 0; follower < size(); ++follower) {
      for (NodeId friend_node : following_[follower]) {
        os << follower << '\t' << friend_node << '\n';
      }
    }
  }

 private:
  std::vector<std::vector<NodeId>> following_;
  std::vector<std::vector<NodeId>> followers_;
  std::size_t n_humans_ = 0;
};

}  // namespace botsim
