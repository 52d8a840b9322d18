#include "certctl/replay.hpp"

#include <stdexcept>

namespace certctl::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (size_ < capacity_) {
    storage_.push_back(std::move(t));
    ++size_;
  } else {
    storage_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch) {
  if (size_ == 0) throw std::runtime_error("replay buffer is empty");
  std::uniform_int_distribution<std::size_t> dist(0, size_ - 1);
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = dist(rng_);
  return out;
}

}  // namespace certctl::learn
