#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "agile/errors.hpp"
#include "agile/rng.hpp"

namespace agile::hrl {

// Fixed-capacity FIFO ring. Once full, each push overwrites the oldest record.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("replay buffer capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  void push(T record) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(record));
    } else {
      storage_[head_] = std::move(record);
    }
    head_ = (head_ + 1) % capacity_;
    ++inserted_;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t inserted() const { return inserted_; }
  bool empty() const { return storage_.empty(); }

  // i = 0 is the oldest record still held.
  const T& at(std::size_t i) const {
    if (i >= storage_.size()) throw ContractError("replay buffer index out of range");
    if (storage_.size() < capacity_) return storage_[i];
    return storage_[(head_ + i) % capacity_];
  }

  // Uniform sampling with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const {
    if (storage_.empty()) throw ContractError("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    return idx;
  }

  const T& raw(std::size_t slot) const { return storage_[slot]; }

 private:
  std::size_t capacity_;
  std::vector<T> storage_;
  std::size_t head_ = 0;
  std::uint64_t inserted_ = 0;
};

}  // namespace agile::hrl
