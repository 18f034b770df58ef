#pragma once

// Feedforward quantile-value approximator: observation in, |U| x N_tau
// quantile estimates out. Rectifier hidden layers, identity output.
//
// Parameters live in one flat row-major buffer so the optimizer, soft target
// updates and checkpointing can treat them as a single vector. Layer l owns a
// weight block (out x in, row-major) followed by its bias (out).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace riskavi {

struct NetworkShape {
  std::size_t obs_dim = 52;
  std::vector<std::size_t> hidden = {120, 84};
  std::size_t n_actions = 5;
  std::size_t n_tau = 32;

  std::size_t output_dim() const { return n_actions * n_tau; }
  /// obs_dim, hidden..., output_dim
  std::vector<std::size_t> layer_dims() const;
  std::size_t parameter_count() const;

  bool operator==(const NetworkShape&) const = default;
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Parameter (or gradient) buffer for a network of a given shape.
class NetworkParams {
 public:
  NetworkParams() = default;
  /// Zero-filled parameters.
  explicit NetworkParams(NetworkShape shape);

  const NetworkShape& shape() const noexcept { return shape_; }
  std::size_t num_layers() const noexcept { return offsets_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Eigen::Map<RowMajorMatrix> weights(std::size_t layer);
  Eigen::Map<const RowMajorMatrix> weights(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

  bool all_finite() const;

  bool operator==(const NetworkParams& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  struct LayerOffset {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight = 0;
    std::size_t bias = 0;
  };

  NetworkShape shape_;
  std::vector<LayerOffset> offsets_;
  std::vector<double> data_;
};

/// Gradients share the parameter layout.
using ParamGrads = NetworkParams;

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
NetworkParams init_network(const NetworkShape& shape, std::uint64_t seed);

/// Quantile estimates for one observation, n_actions x n_tau.
RowMajorMatrix forward(const NetworkParams& params, std::span<const double> obs);

/// Activations retained for a backward pass over a batch. Column b of each
/// matrix corresponds to sample b.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;  ///< input, hidden..., output
};

/// Batched forward pass; `obs` holds one observation per column. The output
/// (activations.back()) has output_dim rows, ordered action-major.
ForwardCache forward_batch(const NetworkParams& params, const Eigen::MatrixXd& obs);

/// Reverse accumulation from d loss / d output (output_dim x batch).
ParamGrads backward_batch(const NetworkParams& params, const ForwardCache& cache,
                          const Eigen::MatrixXd& output_grad);

/// Single-observation gradient; `loss_grad` is n_actions x n_tau.
ParamGrads backward(const NetworkParams& params, std::span<const double> obs,
                    const RowMajorMatrix& loss_grad);

enum class OptimizerKind { sgd, adam };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 2.5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// When set, the step size at update t is k_alpha / (t + 1).
  bool diminishing = false;
  double k_alpha = 0.1;
  std::uint64_t t = 0;
  std::vector<double> m;
  std::vector<double> v;

  void validate() const;
  double effective_lr() const { return diminishing ? k_alpha / static_cast<double>(t + 1) : lr; }
};

/// Apply one optimizer update. Returns false (and leaves params and the
/// optimizer untouched) if any gradient is non-finite.
bool step(NetworkParams& params, const ParamGrads& grads, OptimizerState& opt);

/// target <- eta * online + (1 - eta) * target
void soft_update(NetworkParams& target, const NetworkParams& online, double eta);

/// Mean over quantiles for each action.
Eigen::VectorXd action_means(const RowMajorMatrix& quantiles);

/// Lowest-index argmin.
std::size_t argmin_index(const Eigen::VectorXd& values);

}  // namespace riskavi
