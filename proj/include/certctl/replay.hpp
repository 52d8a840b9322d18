#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "certctl/types.hpp"

namespace certctl::learn {

struct Transition {
  Vector obs;      // (x, psi)
  Vector action;   // policy output vector
  double reward = 0.0;
  Vector next_obs;
  bool terminal = false;
};

/// Fixed-capacity ring buffer with a seeded uniform sampler.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return storage_[i]; }

  /// Uniform with replacement over the filled region; throws if empty.
  std::vector<std::size_t> sample_indices(std::size_t batch);

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;
  std::vector<Transition> storage_;
  std::mt19937_64 rng_;
};

}  // namespace certctl::learn
