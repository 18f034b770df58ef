#include "riskavi/quantile_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskavi/random.hpp"

namespace riskavi {

std::vector<std::size_t> NetworkShape::layer_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(hidden.size() + 2);
  dims.push_back(obs_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim());
  return dims;
}

std::size_t NetworkShape::parameter_count() const {
  const auto dims = layer_dims();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) total += dims[l + 1] * (dims[l] + 1);
  return total;
}

NetworkParams::NetworkParams(NetworkShape shape) : shape_(std::move(shape)) {
  if (shape_.obs_dim == 0 || shape_.n_actions == 0 || shape_.n_tau == 0) {
    throw std::invalid_argument("network dimensions must be >= 1");
  }
  for (std::size_t h : shape_.hidden) {
    if (h == 0) throw std::invalid_argument("hidden layer width must be >= 1");
  }
  const auto dims = shape_.layer_dims();
  std::size_t cursor = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    LayerOffset off{dims[l], dims[l + 1], cursor, cursor + dims[l] * dims[l + 1]};
    cursor = off.bias + off.out;
    offsets_.push_back(off);
  }
  data_.assign(cursor, 0.0);
}

Eigen::Map<RowMajorMatrix> NetworkParams::weights(std::size_t layer) {
  const auto& o = offsets_.at(layer);
  return {data_.data() + o.weight, static_cast<Eigen::Index>(o.out), static_cast<Eigen::Index>(o.in)};
}

Eigen::Map<const RowMajorMatrix> NetworkParams::weights(std::size_t layer) const {
  const auto& o = offsets_.at(layer);
  return {data_.data() + o.weight, static_cast<Eigen::Index>(o.out), static_cast<Eigen::Index>(o.in)};
}

Eigen::Map<Eigen::VectorXd> NetworkParams::bias(std::size_t layer) {
  const auto& o = offsets_.at(layer);
  return {data_.data() + o.bias, static_cast<Eigen::Index>(o.out)};
}

Eigen::Map<const Eigen::VectorXd> NetworkParams::bias(std::size_t layer) const {
  const auto& o = offsets_.at(layer);
  return {data_.data() + o.bias, static_cast<Eigen::Index>(o.out)};
}

bool NetworkParams::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

NetworkParams init_network(const NetworkShape& shape, std::uint64_t seed) {
  NetworkParams params(shape);
  Rng rng(derive_seed(seed, 0x1A17));
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    auto w = params.weights(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    }
  }
  return params;
}

ForwardCache forward_batch(const NetworkParams& params, const Eigen::MatrixXd& obs) {
  if (static_cast<std::size_t>(obs.rows()) != params.shape().obs_dim) {
    throw std::invalid_argument("forward: observation dimension mismatch");
  }
  ForwardCache cache;
  cache.activations.reserve(params.num_layers() + 1);
  cache.activations.push_back(obs);
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    Eigen::MatrixXd z = params.weights(l) * cache.activations.back();
    z.colwise() += params.bias(l);
    if (l + 1 < params.num_layers()) z = z.cwiseMax(0.0);
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

RowMajorMatrix forward(const NetworkParams& params, std::span<const double> obs) {
  if (obs.size() != params.shape().obs_dim) {
    throw std::invalid_argument("forward: observation dimension mismatch");
  }
  for (double v : obs) {
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite observation");
  }
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size()));
  const auto cache = forward_batch(params, x);
  const auto& out = cache.activations.back();
  const auto& s = params.shape();
  RowMajorMatrix q(s.n_actions, s.n_tau);
  for (std::size_t a = 0; a < s.n_actions; ++a) {
    for (std::size_t n = 0; n < s.n_tau; ++n) q(a, n) = out(a * s.n_tau + n, 0);
  }
  return q;
}

ParamGrads backward_batch(const NetworkParams& params, const ForwardCache& cache,
                          const Eigen::MatrixXd& output_grad) {
  const std::size_t layers = params.num_layers();
  if (cache.activations.size() != layers + 1) {
    throw std::invalid_argument("backward: cache does not match network depth");
  }
  const auto& out = cache.activations.back();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
    throw std::invalid_argument("backward: output gradient shape mismatch");
  }

  ParamGrads grads(params.shape());
  Eigen::MatrixXd delta = output_grad;
  for (std::size_t l = layers; l-- > 0;) {
    const auto& input = cache.activations[l];
    grads.weights(l).noalias() = delta * input.transpose();
    grads.bias(l) = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd upstream = params.weights(l).transpose() * delta;
    // Rectifier: no gradient through inactive units.
    delta = (input.array() > 0.0).select(upstream, 0.0);
  }
  return grads;
}

ParamGrads backward(const NetworkParams& params, std::span<const double> obs,
                    const RowMajorMatrix& loss_grad) {
  const auto& s = params.shape();
  if (static_cast<std::size_t>(loss_grad.rows()) != s.n_actions ||
      static_cast<std::size_t>(loss_grad.cols()) != s.n_tau) {
    throw std::invalid_argument("backward: loss gradient must be n_actions x n_tau");
  }
  if (obs.size() != s.obs_dim) throw std::invalid_argument("backward: observation dimension mismatch");
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size()));
  const auto cache = forward_batch(params, x);
  Eigen::MatrixXd g(s.output_dim(), 1);
  for (std::size_t a = 0; a < s.n_actions; ++a) {
    for (std::size_t n = 0; n < s.n_tau; ++n) g(a * s.n_tau + n, 0) = loss_grad(a, n);
  }
  return backward_batch(params, cache, g);
}

void OptimizerState::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("optimizer learning rate must be > 0");
  if (diminishing && !(k_alpha > 0.0)) throw std::invalid_argument("k_alpha must be > 0");
  if (kind == OptimizerKind::adam) {
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("adam betas must lie in (0,1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("adam epsilon must be > 0");
  }
}

bool step(NetworkParams& params, const ParamGrads& grads, OptimizerState& opt) {
  if (!(params.shape() == grads.shape())) throw std::invalid_argument("step: gradient shape mismatch");
  if (!grads.all_finite()) return false;

  auto p = params.data();
  auto g = grads.data();
  const double alpha = opt.effective_lr();

  if (opt.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= alpha * g[i];
  } else {
    if (opt.m.size() != p.size()) {
      opt.m.assign(p.size(), 0.0);
      opt.v.assign(p.size(), 0.0);
    }
    const double k = static_cast<double>(opt.t + 1);
    const double c1 = 1.0 - std::pow(opt.beta1, k);
    const double c2 = 1.0 - std::pow(opt.beta2, k);
    for (std::size_t i = 0; i < p.size(); ++i) {
      opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * g[i];
      opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * g[i] * g[i];
      const double m_hat = opt.m[i] / c1;
      const double v_hat = opt.v[i] / c2;
      p[i] -= alpha * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
  }
  ++opt.t;
  return true;
}

void soft_update(NetworkParams& target, const NetworkParams& online, double eta) {
  if (!(target.shape() == online.shape())) throw std::invalid_argument("soft_update: shape mismatch");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("soft_update: eta must lie in (0,1]");
  auto t = target.data();
  auto o = online.data();
  if (eta == 1.0) {
    std::copy(o.begin(), o.end(), t.begin());
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = eta * o[i] + (1.0 - eta) * t[i];
}

Eigen::VectorXd action_means(const RowMajorMatrix& quantiles) {
  return quantiles.rowwise().mean();
}

std::size_t argmin_index(const Eigen::VectorXd& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) < values(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

}  // namespace riskavi
