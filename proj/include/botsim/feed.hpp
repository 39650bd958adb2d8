#pragma once

// Bounded FIFO news feed. Each entry is a message: a meme id plus the agent
// whose post/repost produced it. Duplicate memes may coexist as distinct
// entries. When full, pushing evicts the oldest entry.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "botsim/meme.hpp"
#include "botsim/network.hpp"

namespace botsim {

struct Message {
  MemeId meme = 0;
  NodeId poster = 0;
};

class Feed {
 public:
  explicit Feed(std::size_t capacity = 0) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("Feed: capacity must be >= 1");
    entries_.reserve(capacity_);
  }

  // Appends a message; returns the evicted (oldest) entry when at capacity.
  std::optional<Message> push(Message msg) {
    if (entries_.size() < capacity_) {
      entries_.push_back(msg);
      return std::nullopt;
    }
    Message evicted = entries_[head_];
    entries_[head_] = msg;
    head_ = (head_ + 1) % capacity_;
    return evicted;
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

  // Entry 0 is the oldest.
  const Message& operator[](std::size_t i) const {
    return entries_[(head_ + i) % entries_.size()];
  }

 private:
  std::size_t capacity_;
  std::vector<Message> entries_;
  std::size_t head_ = 0;  // oldest entry once the buffer wraps
};

}  // namespace botsim
