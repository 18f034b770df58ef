#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "riskavi/random.hpp"

namespace riskavi {

struct Transition {
  std::vector<double> obs;
  std::size_t action = 0;
  double g = 0.0;
  double cost = 0.0;  ///< c_s + c_h for the step
  std::vector<double> next_obs;
  bool done = false;
};

/// Fixed-capacity FIFO ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  /// Throws std::invalid_argument on negative cost or a dimension that
  /// differs from the first stored transition.
  void push(Transition t);

  /// `batch_size` draws with replacement. Throws InsufficientData when fewer
  /// than `batch_size` transitions are stored.
  std::vector<Transition> sample(std::size_t batch_size, Rng& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return storage_.size(); }
  bool empty() const noexcept { return size_ == 0; }

  /// i-th oldest stored transition, 0 <= i < size().
  const Transition& at(std::size_t i) const;

 private:
  std::vector<Transition> storage_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
  std::size_t obs_dim_ = 0;
};

}  // namespace riskavi
