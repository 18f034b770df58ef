#include "riskavi/agent.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include "riskavi/errors.hpp"

namespace riskavi {

namespace {

enum SeedStream : std::uint64_t {
  kNetInit = 11,
  kActing = 12,
  kSampling = 13,
  kEpisodes = 14,
  kEvalEpisodes = 15,
  kEvalPolicy = 16,
};

Eigen::MatrixXd stack_columns(std::span<const Transition> batch, bool next) {
  const std::size_t dim = next ? batch.front().next_obs.size() : batch.front().obs.size();
  Eigen::MatrixXd m(dim, batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& v = next ? batch[b].next_obs : batch[b].obs;
    if (v.size() != dim) throw std::invalid_argument("batch observations have inconsistent dimensions");
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = v[i];
  }
  return m;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::avi: return "avi";
    case Variant::qr_avi: return "qr_avi";
    case Variant::e_qravi: return "e_qravi";
    case Variant::rho_qravi: return "rho_qravi";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "avi") return Variant::avi;
  if (name == "qr_avi") return Variant::qr_avi;
  if (name == "e_qravi") return Variant::e_qravi;
  if (name == "rho_qravi") return Variant::rho_qravi;
  throw std::invalid_argument("unknown variant '" + name + "' (expected avi, qr_avi, e_qravi, rho_qravi)");
}

bool is_risk_variant(Variant v) { return v == Variant::e_qravi || v == Variant::rho_qravi; }

void AgentConfig::validate() const {
  risk.validate();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent.gamma must lie in (0,1]");
  if (!(kappa > 0.0)) throw std::invalid_argument("agent.kappa must be > 0");
  if (n_tau == 0) throw std::invalid_argument("agent.n_tau must be >= 1");
  if (batch == 0) throw std::invalid_argument("agent.batch must be >= 1");
  if (train_freq < 1 || target_freq < 1) throw std::invalid_argument("agent.train_freq and agent.target_freq must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("agent.eta must lie in (0,1]");
  if (!(epsT > 0.0 && eps0 >= epsT && eps0 <= 1.0)) throw std::invalid_argument("agent epsilons must satisfy 1 >= eps0 >= epsT > 0");
  if (eps_decay_steps < 0) throw std::invalid_argument("agent.eps_decay_steps must be >= 0");
  if (total_env_steps < 0) throw std::invalid_argument("agent.total_env_steps must be >= 0");
  if (replay_capacity < batch) throw std::invalid_argument("agent.replay_capacity must be >= agent.batch");
  if (checkpoint_every < 0) throw std::invalid_argument("agent.checkpoint_every must be >= 0");
  if (kde.rule.kind == BandwidthKind::fixed && !(kde.rule.value > 0.0)) {
    throw std::invalid_argument("kde.bandwidth must be > 0 for the fixed rule");
  }
  if (kde.grid_size < 2) throw std::invalid_argument("kde.grid_size must be >= 2");
  net.optimizer.validate();
}

long AgentConfig::resolved_eps_decay_steps() const {
  return eps_decay_steps > 0 ? eps_decay_steps : total_env_steps / 2;
}

NetworkShape agent_network_shape(const AgentConfig& cfg, const EnvConfig& env) {
  NetworkShape shape;
  shape.obs_dim = env.observation_dim();
  shape.hidden = cfg.net.hidden;
  shape.n_actions = kNumActions;
  shape.n_tau = cfg.variant == Variant::avi ? 1 : cfg.n_tau;
  return shape;
}

double epsilon(long t, const AgentConfig& cfg) {
  const long decay = cfg.resolved_eps_decay_steps();
  if (decay <= 0 || t >= decay) return cfg.epsT;
  const double ramp = cfg.eps0 + static_cast<double>(t) * (cfg.epsT - cfg.eps0) / static_cast<double>(decay);
  return std::max(ramp, cfg.epsT);
}

std::size_t select_action(const NetworkParams& params, std::span<const double> obs, double eps, Rng& rng) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("select_action: eps must lie in [0,1]");
  const std::size_t n_actions = params.shape().n_actions;
  if (rng.uniform() < eps) return static_cast<std::size_t>(rng.below(n_actions));
  return argmin_index(action_means(forward(params, obs)));
}

std::vector<QuantileSet> compute_targets(const NetworkParams& target_params,
                                         std::span<const Transition> batch, double gamma,
                                         double shift) {
  if (batch.empty()) throw std::invalid_argument("compute_targets: empty batch");
  const auto& s = target_params.shape();
  const auto cache = forward_batch(target_params, stack_columns(batch, true));
  const auto& out = cache.activations.back();

  std::vector<QuantileSet> targets(batch.size(), QuantileSet(s.n_tau));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    std::size_t best = 0;
    double best_mean = 0.0;
    for (std::size_t a = 0; a < s.n_actions; ++a) {
      double m = 0.0;
      for (std::size_t n = 0; n < s.n_tau; ++n) m += out(static_cast<Eigen::Index>(a * s.n_tau + n), col);
      m /= static_cast<double>(s.n_tau);
      if (a == 0 || m < best_mean) {
        best = a;
        best_mean = m;
      }
    }
    const double bootstrap = gamma * (batch[b].done ? 0.0 : 1.0);
    for (std::size_t n = 0; n < s.n_tau; ++n) {
      targets[b][n] = batch[b].g + bootstrap * out(static_cast<Eigen::Index>(best * s.n_tau + n), col) + shift;
    }
  }
  return targets;
}

BatchRisk batch_risk(std::span<const Transition> batch, const AgentConfig& cfg) {
  std::vector<double> costs;
  costs.reserve(batch.size());
  for (const auto& t : batch) costs.push_back(t.cost);
  if (cfg.variant != Variant::rho_qravi) return {expected_cost(costs), false};
  const auto est = kde_fit(costs, cfg.kde.rule, cfg.kde.grid_size);
  const auto tail = cvar_beta(est, cfg.risk.beta);
  return {tail.value, tail.degenerate_tail};
}

LossBreakdown compute_loss(const NetworkParams& online, std::span<const Transition> batch,
                           std::span<const QuantileSet> targets, const AgentConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("compute_loss: empty batch");
  if (targets.size() != batch.size()) throw std::invalid_argument("compute_loss: batch and targets are not aligned");
  const auto& s = online.shape();
  const auto cache = forward_batch(online, stack_columns(batch, false));
  const auto& out = cache.activations.back();
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(out.rows(), out.cols());
  double fit = 0.0;
  const TauGrid taus = make_tau_grid(s.n_tau);
  std::vector<double> pred(s.n_tau);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const std::size_t a = batch[b].action;
    if (a >= s.n_actions) throw std::invalid_argument("compute_loss: action index out of range");
    if (targets[b].size() != s.n_tau) throw std::invalid_argument("compute_loss: target width mismatch");
    const auto col = static_cast<Eigen::Index>(b);
    const auto row0 = static_cast<Eigen::Index>(a * s.n_tau);
    if (cfg.variant == Variant::avi) {
      // Scalar action value: squared TD error against the first target.
      const double q = out(row0, col);
      const double r = q - targets[b][0];
      fit += r * r;
      dout(row0, col) = 2.0 * r * inv_b;
    } else {
      for (std::size_t n = 0; n < s.n_tau; ++n) pred[n] = out(row0 + static_cast<Eigen::Index>(n), col);
      const auto qr = qr_loss(pred, targets[b], taus, cfg.kappa, cfg.qr_norm);
      fit += qr.loss;
      for (std::size_t n = 0; n < s.n_tau; ++n) dout(row0 + static_cast<Eigen::Index>(n), col) = qr.grad[n] * inv_b;
    }
  }

  LossBreakdown lb;
  lb.quantile = fit * inv_b;
  const auto risk = batch_risk(batch, cfg);
  lb.rho_hat = risk.rho;
  lb.degenerate_tail = risk.degenerate_tail;

  double fit_weight = 1.0;
  if (is_risk_variant(cfg.variant)) {
    fit_weight = 1.0 - cfg.risk.lambda;
    lb.risk = cfg.risk.lambda * risk_penalty(risk.rho, cfg.risk.c_max);
  }
  lb.total = fit_weight * lb.quantile + lb.risk;
  if (fit_weight != 1.0) dout *= fit_weight;
  lb.grads = backward_batch(online, cache, dout);
  return lb;
}

TrainResult train(const AgentConfig& cfg, const EnvConfig& env_cfg, const TrainHooks& hooks) {
  cfg.validate();
  env_cfg.validate();

  TrainResult result;
  auto& state = result.state;
  auto& log = result.log;
  const NetworkShape shape = agent_network_shape(cfg, env_cfg);
  state.online = init_network(shape, derive_seed(cfg.seed, kNetInit));
  state.target = state.online;
  state.optimizer = cfg.net.optimizer;

  if (cfg.total_env_steps == 0) return result;

  ReplayBuffer replay(cfg.replay_capacity);
  Rng act_rng(derive_seed(cfg.seed, kActing));
  Rng sample_rng(derive_seed(cfg.seed, kSampling));
  const std::uint64_t episode_root = derive_seed(derive_seed(cfg.seed, kEpisodes), env_cfg.seed);

  long episode = 0;
  auto [world, obs] = reset(env_cfg, derive_seed(episode_root, static_cast<std::uint64_t>(episode)));
  EpisodeRecord current{episode, 0, 0.0, 0.0, 0};

  for (long t = 0; t < cfg.total_env_steps; ++t) {
    const double eps = epsilon(t, cfg);
    const std::size_t action = select_action(state.online, obs, eps, act_rng);
    StepOutcome out = step(world, action, env_cfg);

    current.steps += 1;
    current.cum_stage_cost += out.g;
    current.cum_violation_cost += out.violation_cost();

    replay.push(Transition{obs, action, out.g, out.violation_cost(), out.obs, out.done});
    obs = std::move(out.obs);

    if (out.done) {
      current.goals = world.goals_reached;
      log.episodes.push_back(current);
      ++episode;
      auto next = reset(env_cfg, derive_seed(episode_root, static_cast<std::uint64_t>(episode)));
      world = std::move(next.world);
      obs = std::move(next.obs);
      current = EpisodeRecord{episode, 0, 0.0, 0.0, 0};
    }

    const long step_index = t + 1;
    state.step = step_index;

    if (replay.size() >= cfg.batch && step_index % cfg.train_freq == 0) {
      const auto batch = replay.sample(cfg.batch, sample_rng);
      double shift = 0.0;
      if (cfg.risk_shaped_targets && is_risk_variant(cfg.variant)) {
        shift = cfg.risk.lambda * risk_penalty(batch_risk(batch, cfg).rho, cfg.risk.c_max);
      }
      const auto targets = compute_targets(state.target, batch, cfg.gamma, shift);
      auto loss = compute_loss(state.online, batch, targets, cfg);
      if (!std::isfinite(loss.total)) {
        throw NumericFailure("non-finite loss (quantile=" + std::to_string(loss.quantile) +
                                 ", risk=" + std::to_string(loss.risk) + ")",
                             step_index);
      }
      if (!step(state.online, loss.grads, state.optimizer)) ++log.skipped_updates;
      log.updates.push_back(UpdateRecord{step_index, loss.quantile, loss.risk, loss.total, eps,
                                         loss.rho_hat, loss.degenerate_tail});
    }

    if (step_index % cfg.target_freq == 0) soft_update(state.target, state.online, cfg.eta);

    if (cfg.checkpoint_every > 0 && step_index % cfg.checkpoint_every == 0 && hooks.on_checkpoint) {
      hooks.on_checkpoint(state, log);
    }
  }
  return result;
}

TrainSummary summarize(const TrainLog& log) {
  TrainSummary s;
  s.updates = log.updates.size();
  if (log.updates.empty()) return s;
  double q = 0.0;
  for (const auto& u : log.updates) q += u.quantile_loss;
  s.quantile_loss_avg = q / static_cast<double>(s.updates);

  const std::size_t tail = std::max<std::size_t>(1, s.updates / 10);
  double qf = 0.0, rf = 0.0, tf = 0.0;
  for (std::size_t i = s.updates - tail; i < s.updates; ++i) {
    qf += log.updates[i].quantile_loss;
    rf += log.updates[i].risk_loss;
    tf += log.updates[i].total_loss;
  }
  const double n = static_cast<double>(tail);
  s.quantile_loss_final = qf / n;
  s.risk_loss_final = rf / n;
  s.total_loss_final = tf / n;
  return s;
}

std::vector<double> running_mean(std::span<const double> values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("running_mean: window must be >= 1");
  std::vector<double> out(values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i];
    if (i >= window) acc -= values[i - window];
    out[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

Policy greedy_policy(const NetworkParams& params) {
  return [&params](std::span<const double> obs, Rng&) {
    return argmin_index(action_means(forward(params, obs)));
  };
}

Policy random_policy() {
  return [](std::span<const double>, Rng& rng) { return static_cast<std::size_t>(rng.below(kNumActions)); };
}

std::uint64_t eval_episode_seed(std::uint64_t seed, long episode) {
  return derive_seed(derive_seed(seed, kEvalEpisodes), static_cast<std::uint64_t>(episode));
}

namespace {

std::vector<EvalEpisode> run_seed(const Policy& policy, std::uint64_t seed, long episodes,
                                  const EnvConfig& env_cfg, bool keep_traces) {
  std::vector<EvalEpisode> out;
  out.reserve(static_cast<std::size_t>(episodes));
  Rng rng(derive_seed(seed, kEvalPolicy));
  for (long e = 0; e < episodes; ++e) {
    auto [world, obs] = reset(env_cfg, eval_episode_seed(seed, e));
    EvalEpisode ep;
    ep.seed = seed;
    ep.episode = e;
    bool done = false;
    while (!done) {
      const std::size_t action = policy(obs, rng);
      StepOutcome o = step(world, action, env_cfg);
      ep.steps += 1;
      ep.cum_stage_cost += o.g;
      ep.cum_violation_cost += o.violation_cost();
      if (keep_traces) {
        ep.trace.push_back(TraceRow{world.step_count, world.robot.x, world.robot.y, world.robot.theta,
                                    action, o.g, o.c_s, o.c_h, o.goal_reached});
      }
      done = o.done;
      obs = std::move(o.obs);
    }
    ep.goals = world.goals_reached;
    out.push_back(std::move(ep));
  }
  return out;
}

}  // namespace

EvalMetrics evaluate_policy(const Policy& policy, std::span<const std::uint64_t> seeds,
                            long episodes_per_seed, const EnvConfig& env_cfg, bool keep_traces,
                            std::size_t jobs) {
  env_cfg.validate();
  if (episodes_per_seed < 1) throw std::invalid_argument("evaluate: episodes_per_seed must be >= 1");

  std::vector<std::vector<EvalEpisode>> per_seed(seeds.size());
  if (jobs <= 1 || seeds.size() <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      per_seed[i] = run_seed(policy, seeds[i], episodes_per_seed, env_cfg, keep_traces);
    }
  } else {
    // Fixed batches of `jobs` seeds; each task owns its environment and RNG.
    for (std::size_t start = 0; start < seeds.size(); start += jobs) {
      std::vector<std::future<std::vector<EvalEpisode>>> tasks;
      const std::size_t stop = std::min(seeds.size(), start + jobs);
      for (std::size_t i = start; i < stop; ++i) {
        tasks.push_back(std::async(std::launch::async, run_seed, std::cref(policy), seeds[i],
                                   episodes_per_seed, std::cref(env_cfg), keep_traces));
      }
      for (std::size_t i = start; i < stop; ++i) per_seed[i] = tasks[i - start].get();
    }
  }

  EvalMetrics m;
  std::vector<double> per_step_cost;
  std::vector<double> per_step_violation;
  for (auto& block : per_seed) {
    for (auto& ep : block) {
      const double steps = static_cast<double>(ep.steps);
      per_step_cost.push_back(ep.cum_stage_cost / steps);
      per_step_violation.push_back(ep.cum_violation_cost / steps);
      m.total_goals += ep.goals;
      m.per_episode.push_back(std::move(ep));
    }
  }
  m.episodes = m.per_episode.size();
  m.avg_cost_to_go = mean_of(per_step_cost);
  m.violation_mean = mean_of(per_step_violation);
  if (per_step_violation.size() > 1) {
    double ss = 0.0;
    for (double v : per_step_violation) ss += (v - m.violation_mean) * (v - m.violation_mean);
    m.violation_std = std::sqrt(ss / static_cast<double>(per_step_violation.size() - 1));
  }
  return m;
}

EvalMetrics evaluate(const NetworkParams& params, std::span<const std::uint64_t> seeds,
                     long episodes_per_seed, const EnvConfig& env_cfg, bool keep_traces,
                     std::size_t jobs) {
  return evaluate_policy(greedy_policy(params), seeds, episodes_per_seed, env_cfg, keep_traces, jobs);
}

}  // namespace riskavi
