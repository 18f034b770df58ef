#pragma once

// Risk-regularized quantile-regression action-value iteration.
//
// Four training losses share one loop:
//   avi        squared TD error on a scalar action value
//   qr_avi     Huber quantile regression loss L_QR
//   e_qravi    (1 - lambda) L_QR + lambda (max(0, E[C] - c_max))^2
//   rho_qravi  (1 - lambda) L_QR + lambda (max(0, CVaR_beta[C] - c_max))^2
// where C is the batch of violation costs and CVaR is read off a KDE fit.
// Actions minimize cost throughout.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskavi/env.hpp"
#include "riskavi/quantile_net.hpp"
#include "riskavi/random.hpp"
#include "riskavi/replay.hpp"
#include "riskavi/risk.hpp"

namespace riskavi {

enum class Variant { avi, qr_avi, e_qravi, rho_qravi };

std::string to_string(Variant v);
/// Accepts avi, qr_avi, e_qravi, rho_qravi. Throws std::invalid_argument.
Variant parse_variant(const std::string& name);
bool is_risk_variant(Variant v);

struct KdeConfig {
  BandwidthRule rule = BandwidthRule::scott();
  std::size_t grid_size = kDefaultKdeGrid;
};

struct NetConfig {
  std::vector<std::size_t> hidden = {120, 84};
  OptimizerState optimizer;
};

struct AgentConfig {
  Variant variant = Variant::rho_qravi;
  RiskConfig risk;
  double gamma = 0.99;
  double kappa = 1.0;
  std::size_t n_tau = 32;
  std::size_t batch = 128;
  long train_freq = 10;
  long target_freq = 500;
  double eta = 1.0;
  double eps0 = 1.0;
  double epsT = 0.05;
  /// 0 means half of total_env_steps.
  long eps_decay_steps = 0;
  long total_env_steps = 1'000'000;
  std::size_t replay_capacity = 50'000;
  std::uint64_t seed = 0;
  QrNormalization qr_norm = QrNormalization::mean_both;
  /// Extension: add lambda * risk penalty to every bootstrap target so the
  /// risk term reaches the parameters through the TD targets.
  bool risk_shaped_targets = false;
  KdeConfig kde;
  NetConfig net;
  /// Checkpoint hook interval in environment steps; 0 disables it.
  long checkpoint_every = 0;

  void validate() const;
  long resolved_eps_decay_steps() const;
};

/// Network topology used by a given agent/env pairing. The avi variant uses
/// a single output per action.
NetworkShape agent_network_shape(const AgentConfig& cfg, const EnvConfig& env);

/// Linear ramp from eps0 to epsT over the decay horizon, flat afterwards.
double epsilon(long t, const AgentConfig& cfg);

/// Epsilon-greedy over the per-action quantile means. Exactly one uniform draw
/// is consumed per call (plus one more on exploration). Ties go to the lowest
/// index.
std::size_t select_action(const NetworkParams& params, std::span<const double> obs, double eps, Rng& rng);

/// Bootstrap targets y_j = g + gamma (1 - d) theta'(next_obs, u*, j) + shift,
/// with u* the target network's greedy action.
std::vector<QuantileSet> compute_targets(const NetworkParams& target_params,
                                         std::span<const Transition> batch, double gamma,
                                         double shift = 0.0);

struct BatchRisk {
  double rho = 0.0;  ///< E[C] for e_qravi, CVaR_beta for rho_qravi, E[C] otherwise
  bool degenerate_tail = false;
};

BatchRisk batch_risk(std::span<const Transition> batch, const AgentConfig& cfg);

struct LossBreakdown {
  double total = 0.0;
  double quantile = 0.0;  ///< L_QR (or the squared TD error for avi), unweighted
  double risk = 0.0;      ///< lambda * risk penalty; zero for avi and qr_avi
  double rho_hat = 0.0;
  bool degenerate_tail = false;
  ParamGrads grads;
};

/// Composite loss and its parameter gradient. The risk term depends only on
/// the batch costs, so the gradient is (1 - lambda) d L_QR for the risk
/// variants.
LossBreakdown compute_loss(const NetworkParams& online, std::span<const Transition> batch,
                           std::span<const QuantileSet> targets, const AgentConfig& cfg);

struct UpdateRecord {
  long step = 0;
  double quantile_loss = 0.0;
  double risk_loss = 0.0;
  double total_loss = 0.0;
  double epsilon = 0.0;
  double rho_hat = 0.0;
  bool degenerate_tail = false;
};

struct EpisodeRecord {
  long episode = 0;
  long steps = 0;
  double cum_stage_cost = 0.0;
  double cum_violation_cost = 0.0;
  long goals = 0;
};

struct TrainLog {
  std::vector<UpdateRecord> updates;
  std::vector<EpisodeRecord> episodes;
  long skipped_updates = 0;
};

struct TrainState {
  NetworkParams online;
  NetworkParams target;
  OptimizerState optimizer;
  long step = 0;
};

struct TrainHooks {
  /// Called every checkpoint_every environment steps.
  std::function<void(const TrainState&, const TrainLog&)> on_checkpoint;
};

struct TrainResult {
  TrainState state;
  TrainLog log;
};

/// Run the full interaction/update loop. Throws NumericFailure on a
/// non-finite loss.
TrainResult train(const AgentConfig& cfg, const EnvConfig& env_cfg, const TrainHooks& hooks = {});

/// Aggregates reported next to evaluation results.
struct TrainSummary {
  std::size_t updates = 0;
  double quantile_loss_avg = 0.0;    ///< over all updates
  double quantile_loss_final = 0.0;  ///< over the final 10% of updates
  double risk_loss_final = 0.0;      ///< over the final 10% of updates
  double total_loss_final = 0.0;     ///< over the final 10% of updates
};

TrainSummary summarize(const TrainLog& log);

/// Trailing running mean with the given window (shorter at the start).
std::vector<double> running_mean(std::span<const double> values, std::size_t window);

using Policy = std::function<std::size_t(std::span<const double> obs, Rng& rng)>;

Policy greedy_policy(const NetworkParams& params);
Policy random_policy();

struct EvalEpisode {
  std::uint64_t seed = 0;
  long episode = 0;
  long steps = 0;
  double cum_stage_cost = 0.0;
  double cum_violation_cost = 0.0;
  long goals = 0;
  std::vector<TraceRow> trace;  ///< filled only when traces are requested
};

struct EvalMetrics {
  std::size_t episodes = 0;
  double avg_cost_to_go = 0.0;  ///< mean over episodes of per-step stage cost
  double violation_mean = 0.0;  ///< mean over episodes of per-step violation cost
  double violation_std = 0.0;
  long total_goals = 0;
  std::vector<EvalEpisode> per_episode;
};

std::uint64_t eval_episode_seed(std::uint64_t seed, long episode);

/// Roll out `policy` for episodes_per_seed episodes per seed. Seeds may run
/// on `jobs` worker threads; results are merged in seed order.
EvalMetrics evaluate_policy(const Policy& policy, std::span<const std::uint64_t> seeds,
                            long episodes_per_seed, const EnvConfig& env_cfg,
                            bool keep_traces = false, std::size_t jobs = 1);

/// Greedy (eps = 0) evaluation of trained parameters.
EvalMetrics evaluate(const NetworkParams& params, std::span<const std::uint64_t> seeds,
                     long episodes_per_seed, const EnvConfig& env_cfg, bool keep_traces = false,
                     std::size_t jobs = 1);

}  // namespace riskavi
