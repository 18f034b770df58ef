#include "riskavi/replay.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "riskavi/errors.hpp"

namespace riskavi {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
  if (!(t.cost >= 0.0) || !std::isfinite(t.cost)) {
    throw std::invalid_argument("replay: transition cost must be finite and non-negative");
  }
  if (t.obs.size() != t.next_obs.size()) {
    throw std::invalid_argument("replay: obs and next_obs dimensions differ");
  }
  if (size_ == 0 && obs_dim_ == 0) {
    obs_dim_ = t.obs.size();
  } else if (t.obs.size() != obs_dim_) {
    throw std::invalid_argument("replay: observation dimension " + std::to_string(t.obs.size()) +
                                " does not match buffer dimension " + std::to_string(obs_dim_));
  }
  storage_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % storage_.size();
  if (size_ < storage_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay: index out of range");
  const std::size_t oldest = size_ < storage_.size() ? 0 : cursor_;
  return storage_[(oldest + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) throw std::invalid_argument("replay: batch size must be >= 1");
  if (size_ < batch_size) {
    throw InsufficientData("replay: " + std::to_string(size_) + " transitions stored, batch of " +
                           std::to_string(batch_size) + " requested");
  }
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(size_));
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i : sample_indices(batch_size, rng)) batch.push_back(at(i));
  return batch;
}

}  // namespace riskavi
