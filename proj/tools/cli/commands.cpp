#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "cli/csv.hpp"
#include "riskavi/checkpoint.hpp"
#include "riskavi/errors.hpp"
#include "riskavi/risk.hpp"
#include "riskavi/tabular.hpp"

namespace fs = std::filesystem;

namespace riskavi::cli {
namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::map<std::string, std::string> checkpoint_metadata(const RunConfig& cfg, const TrainLog& log) {
  auto meta = config_map(cfg);
  const auto s = summarize(log);
  meta["summary.updates"] = std::to_string(s.updates);
  meta["summary.quantile_loss_avg"] = format_double(s.quantile_loss_avg);
  meta["summary.quantile_loss_final"] = format_double(s.quantile_loss_final);
  meta["summary.risk_loss_final"] = format_double(s.risk_loss_final);
  meta["summary.total_loss_final"] = format_double(s.total_loss_final);
  return meta;
}

Checkpoint make_checkpoint(const RunConfig& cfg, const TrainState& state, const TrainLog& log) {
  Checkpoint ckpt;
  ckpt.metadata = checkpoint_metadata(cfg, log);
  ckpt.global_step = static_cast<std::uint64_t>(state.step);
  ckpt.online = state.online;
  ckpt.target = state.target;
  ckpt.optimizer = state.optimizer;
  return ckpt;
}

long count_degenerate(const TrainLog& log) {
  return static_cast<long>(std::count_if(log.updates.begin(), log.updates.end(),
                                         [](const UpdateRecord& u) { return u.degenerate_tail; }));
}

RunConfig config_from_metadata(const std::map<std::string, std::string>& meta) {
  RunConfig cfg = default_config(Scale::full);
  for (const auto& [k, v] : meta) {
    if (is_config_key(k)) set_value(cfg, k, v);
  }
  return cfg;
}

double meta_double(const std::map<std::string, std::string>& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw CorruptCheckpoint("checkpoint metadata lacks " + key);
  return std::stod(it->second);
}

}  // namespace

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---- train ----------------------------------------------------------------

int cmd_train(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  validate(cfg);
  fs::create_directories(out_dir);
  write_text(out_dir / "config.txt", render_config(cfg));

  TrainHooks hooks;
  if (cfg.agent.checkpoint_every > 0) {
    fs::create_directories(out_dir / "checkpoints");
    hooks.on_checkpoint = [&](const TrainState& state, const TrainLog& tl) {
      save_checkpoint(out_dir / "checkpoints" / ("step_" + std::to_string(state.step) + ".bin"),
                      make_checkpoint(cfg, state, tl));
    };
  }

  log << "train: variant=" << to_string(cfg.agent.variant) << " steps=" << cfg.agent.total_env_steps
      << " seed=" << cfg.agent.seed << " -> " << out_dir.string() << "\n";
  TrainResult result;
  try {
    result = train(cfg.agent, cfg.env, hooks);
  } catch (const NumericFailure& e) {
    write_text(out_dir / "failure.txt", "kind=numeric\nstep=" + std::to_string(e.step()) +
                                            "\nmessage=" + e.what() + "\n");
    log << "train: numeric failure at step " << e.step() << ": " << e.what() << "\n";
    return kExitNumeric;
  }

  {
    CsvWriter csv(out_dir / "train_log.csv",
                  {"step", "quantile_loss", "risk_loss", "total_loss", "epsilon", "rho_hat"});
    for (const auto& u : result.log.updates) {
      csv << u.step << u.quantile_loss << u.risk_loss << u.total_loss << u.epsilon << u.rho_hat;
      csv.end_row();
    }
    csv.close();
  }
  {
    CsvWriter csv(out_dir / "episodes.csv",
                  {"episode", "steps", "cum_stage_cost", "cum_violation_cost", "goals"});
    for (const auto& e : result.log.episodes) {
      csv << e.episode << e.steps << e.cum_stage_cost << e.cum_violation_cost << e.goals;
      csv.end_row();
    }
    csv.close();
  }
  const auto s = summarize(result.log);
  {
    CsvWriter csv(out_dir / "train_summary.csv",
                  {"updates", "skipped_updates", "degenerate_tails", "episodes", "quantile_loss_avg",
                   "quantile_loss_final", "risk_loss_final", "total_loss_final"});
    csv << s.updates << result.log.skipped_updates << count_degenerate(result.log)
        << result.log.episodes.size() << s.quantile_loss_avg << s.quantile_loss_final
        << s.risk_loss_final << s.total_loss_final;
    csv.end_row();
    csv.close();
  }
  save_checkpoint(out_dir / "checkpoint.bin", make_checkpoint(cfg, result.state, result.log));
  log << "train: " << s.updates << " updates, final quantile loss " << s.quantile_loss_final << "\n";
  return kExitOk;
}

// ---- eval -----------------------------------------------------------------

std::vector<double> normalized_success(const std::vector<long>& goals) {
  const long best = goals.empty() ? 0 : *std::max_element(goals.begin(), goals.end());
  std::vector<double> out;
  for (long g : goals) out.push_back(best > 0 ? 100.0 * static_cast<double>(g) / static_cast<double>(best) : 100.0);
  return out;
}

int cmd_eval(const EvalOptions& opts, const fs::path& out_dir, std::ostream& log) {
  if (opts.checkpoints.empty() && !opts.random_baseline) {
    throw std::invalid_argument("eval: no checkpoint given");
  }
  if (opts.seeds.empty()) throw std::invalid_argument("eval: empty seed list");
  if (opts.episodes_per_seed < 1) throw std::invalid_argument("eval: episodes per seed must be >= 1");

  struct Row {
    std::string source;
    std::string variant;
    std::string beta, lambda, quantile_loss_avg, total_loss;
    EvalMetrics metrics;
  };
  std::vector<Row> rows;
  EnvConfig baseline_env;
  bool have_env = false;
  for (const auto& path : opts.checkpoints) {
    const Checkpoint ckpt = load_checkpoint(path);
    const RunConfig cfg = config_from_metadata(ckpt.metadata);
    validate(cfg);
    Row row;
    row.source = path.string();
    row.variant = to_string(cfg.agent.variant);
    if (is_risk_variant(cfg.agent.variant)) {
      row.beta = format_double(cfg.agent.risk.beta);
      row.lambda = format_double(cfg.agent.risk.lambda);
    }
    row.quantile_loss_avg = format_double(meta_double(ckpt.metadata, "summary.quantile_loss_avg"));
    row.total_loss = format_double(meta_double(ckpt.metadata, "summary.total_loss_final"));
    log << "eval: " << row.source << " (" << row.variant << ")\n";
    row.metrics = evaluate(ckpt.online, opts.seeds, opts.episodes_per_seed, cfg.env, opts.traces, opts.jobs);
    if (!have_env) {
      baseline_env = cfg.env;
      have_env = true;
    }
    rows.push_back(std::move(row));
  }
  if (opts.random_baseline) {
    Row row;
    row.source = "random";
    row.variant = "random";
    row.metrics = evaluate_policy(random_policy(), opts.seeds, opts.episodes_per_seed,
                                  have_env ? baseline_env : default_config(Scale::full).env, opts.traces,
                                  opts.jobs);
    rows.push_back(std::move(row));
  }

  std::vector<long> goals;
  for (const auto& r : rows) goals.push_back(r.metrics.total_goals);
  const auto success = normalized_success(goals);

  fs::create_directories(out_dir);
  {
    CsvWriter csv(out_dir / "eval_summary.csv",
                  {"source", "variant", "beta", "lambda", "episodes", "avg_cost_to_go", "violation_mean",
                   "violation_std", "quantile_loss_avg", "total_loss_final10", "total_goals",
                   "normalized_success_rate"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      csv << r.source << r.variant << r.beta << r.lambda << r.metrics.episodes << r.metrics.avg_cost_to_go
          << r.metrics.violation_mean << r.metrics.violation_std << r.quantile_loss_avg << r.total_loss
          << r.metrics.total_goals << success[i];
      csv.end_row();
    }
    csv.close();
  }
  {
    CsvWriter csv(out_dir / "eval_episodes.csv",
                  {"source", "seed", "episode", "steps", "cum_stage_cost", "cum_violation_cost", "goals"});
    for (const auto& r : rows) {
      for (const auto& e : r.metrics.per_episode) {
        csv << r.source << static_cast<std::size_t>(e.seed) << e.episode << e.steps << e.cum_stage_cost
            << e.cum_violation_cost << e.goals;
        csv.end_row();
      }
    }
    csv.close();
  }
  if (opts.traces) {
    CsvWriter csv(out_dir / "traces.csv", {"source", "seed", "episode", "t", "x", "y", "theta", "action", "g",
                                           "c_s", "c_h", "goal_reached"});
    for (const auto& r : rows) {
      for (const auto& e : r.metrics.per_episode) {
        for (const auto& t : e.trace) {
          csv << r.source << static_cast<std::size_t>(e.seed) << e.episode << t.t << t.x << t.y << t.theta
              << t.action << t.g << t.c_s << t.c_h << t.goal_reached;
          csv.end_row();
        }
      }
    }
    csv.close();
  }
  return kExitOk;
}

// ---- pareto ---------------------------------------------------------------

std::vector<bool> pareto_front(const std::vector<ParetoPoint>& points) {
  std::vector<bool> front(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].ok) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && points[j].ok && points[j].quantile_loss < points[i].quantile_loss &&
                  points[j].risk_loss < points[i].risk_loss;
    }
    front[i] = !dominated;
  }
  return front;
}

int cmd_pareto(const RunConfig& cfg, const ParetoOptions& opts, const fs::path& out_dir, std::ostream& log) {
  if (opts.betas.empty() || opts.lambdas.empty()) throw std::invalid_argument("pareto: empty beta or lambda grid");
  validate(cfg);

  struct Cell {
    double beta = 0.0;
    double lambda = 0.0;
    TrainSummary summary;
    std::string error;
  };
  std::vector<Cell> cells;
  for (double b : opts.betas) {
    for (double l : opts.lambdas) cells.push_back({b, l, {}, {}});
  }

  std::mutex log_mutex;
  parallel_for(cells.size(), opts.jobs, [&](std::size_t i) {
    auto& cell = cells[i];
    RunConfig c = cfg;
    c.agent.variant = Variant::rho_qravi;
    c.agent.risk.beta = cell.beta;
    c.agent.risk.lambda = cell.lambda;
    try {
      c.agent.risk.validate();
      cell.summary = summarize(train(c.agent, c.env).log);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    std::lock_guard lock(log_mutex);
    log << "pareto: beta=" << cell.beta << " lambda=" << cell.lambda
        << (cell.error.empty() ? " done" : " failed: " + cell.error) << "\n";
  });

  std::vector<ParetoPoint> points;
  for (const auto& c : cells) {
    points.push_back({c.summary.quantile_loss_final, c.summary.risk_loss_final, c.error.empty()});
  }
  const auto front = pareto_front(points);

  fs::create_directories(out_dir);
  write_text(out_dir / "config.txt", render_config(cfg));
  CsvWriter csv(out_dir / "pareto.csv",
                {"beta", "lambda", "status", "quantile_loss", "risk_loss", "total_loss", "pareto", "error"});
  bool any_failed = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    csv << c.beta << c.lambda;
    if (c.error.empty()) {
      csv << "ok" << c.summary.quantile_loss_final << c.summary.risk_loss_final << c.summary.total_loss_final;
    } else {
      any_failed = true;
      csv << "failed" << "" << "" << "";
    }
    csv << front[i] << c.error;
    csv.end_row();
  }
  csv.close();
  return any_failed ? kExitFailure : kExitOk;
}

// ---- kde-demo -------------------------------------------------------------

double TruncatedPareto::cdf(double x) const {
  if (x <= lo) return 0.0;
  if (x >= 1.0) return 1.0;
  return (1.0 - std::pow(lo / x, shape)) / (1.0 - std::pow(lo, shape));
}

double TruncatedPareto::quantile(double q) const {
  const double z = 1.0 - std::pow(lo, shape);
  return lo * std::pow(1.0 - q * z, -1.0 / shape);
}

double TruncatedPareto::cvar(double beta) const {
  const double q = quantile(beta);
  const double z = 1.0 - std::pow(lo, shape);
  const double a = shape;
  // integral_q^1 x f(x) dx with f(x) = a lo^a x^(-a-1) / z
  const double tail = a * std::pow(lo, a) / z * (1.0 - std::pow(q, 1.0 - a)) / (1.0 - a);
  return tail / (1.0 - beta);
}

std::vector<KdeDemoRow> kde_convergence(const KdeDemoOptions& opts) {
  if (opts.sizes.empty()) throw std::invalid_argument("kde-demo: empty sample-size list");
  if (opts.resamples == 0) throw std::invalid_argument("kde-demo: resamples must be >= 1");
  const TruncatedPareto dist;
  std::vector<KdeDemoRow> rows;
  for (std::size_t b : opts.sizes) {
    if (b < 2) throw std::invalid_argument("kde-demo: sample sizes must be >= 2");
    std::vector<std::vector<double>> estimates(opts.betas.size());
    for (std::size_t r = 0; r < opts.resamples; ++r) {
      CounterRng rng(derive_seed(derive_seed(opts.seed, b), r));
      std::vector<double> samples(b);
      for (auto& x : samples) x = dist.quantile(rng.uniform());
      double h = opts.bandwidth;
      if (opts.bandwidth_is_sd_factor) {
        double mean = 0.0, ss = 0.0;
        for (double x : samples) mean += x;
        mean /= static_cast<double>(b);
        for (double x : samples) ss += (x - mean) * (x - mean);
        h *= std::sqrt(ss / static_cast<double>(b - 1));
      }
      const auto est = kde_fit(samples, BandwidthRule::fixed(h));
      for (std::size_t k = 0; k < opts.betas.size(); ++k) {
        estimates[k].push_back(cvar_beta(est, opts.betas[k]).value);
      }
    }
    for (std::size_t k = 0; k < opts.betas.size(); ++k) {
      KdeDemoRow row;
      row.samples = b;
      row.beta = opts.betas[k];
      row.true_cvar = dist.cvar(row.beta);
      std::vector<double> errs;
      double sum = 0.0;
      for (double e : estimates[k]) {
        sum += e;
        errs.push_back(std::abs(e - row.true_cvar));
      }
      const double n = static_cast<double>(errs.size());
      row.mean_estimate = sum / n;
      double esum = 0.0;
      for (double e : errs) esum += e;
      row.mean_abs_error = esum / n;
      double var = 0.0;
      for (double e : errs) var += (e - row.mean_abs_error) * (e - row.mean_abs_error);
      row.std_abs_error = errs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

int cmd_kde_demo(const KdeDemoOptions& opts, const fs::path& out_dir, std::ostream& log) {
  const auto rows = kde_convergence(opts);
  fs::create_directories(out_dir);
  {
    CsvWriter csv(out_dir / "kde_demo.csv", {"samples", "beta", "bandwidth", "bandwidth_mode", "resamples", "true_cvar",
                                             "mean_estimate", "mean_abs_error", "std_abs_error"});
    for (const auto& r : rows) {
      csv << r.samples << r.beta << opts.bandwidth << (opts.bandwidth_is_sd_factor ? "sd_factor" : "fixed")
          << opts.resamples << r.true_cvar << r.mean_estimate
          << r.mean_abs_error << r.std_abs_error;
      csv.end_row();
    }
    csv.close();
  }

  // Tail probability beyond the KDE's VaR, KDE vs the N(0.06, 0.1^2) reference.
  const double mu = 0.06, sigma = 0.1;
  CounterRng rng(derive_seed(opts.seed, 0x7A11));
  std::vector<double> samples;
  samples.reserve(opts.tail_samples);
  while (samples.size() < opts.tail_samples) {
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    const double x = mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    if (x >= 0.0) samples.push_back(x);
  }
  const auto est = kde_fit(samples, BandwidthRule::scott());
  CsvWriter csv(out_dir / "kde_tail.csv",
                {"beta", "samples", "bandwidth", "var_kde", "tail_kde", "tail_normal", "abs_delta"});
  for (double beta : opts.tail_betas) {
    const double var = var_beta(est, beta);
    // KDE tail mass by trapezoid beyond var.
    double tail = 0.0, total = 0.0;
    for (std::size_t i = 1; i < est.grid_x.size(); ++i) {
      const double piece = 0.5 * (est.grid_pdf[i] + est.grid_pdf[i - 1]) * (est.grid_x[i] - est.grid_x[i - 1]);
      total += piece;
      if (est.grid_x[i - 1] >= var) tail += piece;
    }
    tail /= total;
    const double normal_tail = 0.5 * std::erfc((var - mu) / (sigma * std::sqrt(2.0)));
    csv << beta << samples.size() << est.bandwidth << var << tail << normal_tail << std::abs(tail - normal_tail);
    csv.end_row();
  }
  csv.close();
  log << "kde-demo: wrote " << rows.size() << " convergence rows\n";
  return kExitOk;
}

// ---- verify ---------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t base, std::size_t i) { return derive_seed(base, i); }

double max_ratio_after_burn_in(const std::vector<double>& trace, double burn_in_fraction) {
  const auto start = static_cast<std::size_t>(std::ceil(burn_in_fraction * static_cast<double>(trace.size())));
  double worst = 0.0;
  for (std::size_t i = std::max<std::size_t>(start, 1); i < trace.size(); ++i) {
    if (trace[i - 1] > 1e-12) worst = std::max(worst, trace[i] / trace[i - 1]);
  }
  return worst;
}

int cmd_verify(const VerifyOptions& opts, const fs::path& out_dir, std::ostream& log) {
  if (opts.trials < 1) throw std::invalid_argument("verify: trials must be >= 1");
  if (opts.betas.empty()) throw std::invalid_argument("verify: empty beta list");
  if (!(opts.gamma >= 0.0 && opts.gamma < 1.0)) throw std::invalid_argument("verify: gamma must be in [0,1)");
  if (!(opts.burn_in_fraction >= 0.0 && opts.burn_in_fraction < 1.0)) {
    throw std::invalid_argument("verify: burn-in fraction must be in [0,1)");
  }

  const std::size_t nb = opts.betas.size();
  std::vector<ContractionTrial> trials(opts.trials * nb);
  parallel_for(trials.size(), opts.jobs, [&](std::size_t k) {
    const std::size_t b = k / opts.trials, i = k % opts.trials;
    const auto seed = trial_seed(opts.seed, i);
    const auto [ns, na] = campaign_dims(seed);
    trials[k] = contraction_trial(seed, opts.betas[b], opts.gamma, ns, na);
  });

  struct FixedPointRow {
    std::size_t mdp = 0;
    double beta = 0.0;
    FixedPointResult from_zero, from_random;
    double max_ratio = 0.0;
    double init_distance = 0.0;
  };
  std::vector<FixedPointRow> fp(opts.fixed_point_mdps * nb);
  const CostMap psi;
  parallel_for(fp.size(), opts.jobs, [&](std::size_t k) {
    auto& row = fp[k];
    row.beta = opts.betas[k / opts.fixed_point_mdps];
    row.mdp = k % opts.fixed_point_mdps;
    Rng rng(derive_seed(derive_seed(opts.seed, 0xF1CED), row.mdp));
    const auto mdp = random_mdp(5, 3, opts.fixed_point_gamma, rng);
    const auto init = random_zmap(mdp, 8, -3.0, 3.0, rng);
    row.from_zero = fixed_point_iterate(mdp, row.beta, psi, opts.fixed_point_tol, opts.fixed_point_max_iter);
    row.from_random =
        fixed_point_iterate(mdp, row.beta, psi, opts.fixed_point_tol, opts.fixed_point_max_iter, init);
    row.max_ratio = max_ratio_after_burn_in(row.from_zero.trace, opts.burn_in_fraction);
    row.init_distance = sup_w1(row.from_zero.z, row.from_random.z);
  });

  std::vector<ProbeStats> probes(nb);
  parallel_for(nb, opts.jobs, [&](std::size_t b) {
    probes[b] = nonexpansiveness_probe(opts.betas[b], opts.probe_trials, derive_seed(opts.seed, 0x9B0BE + b));
  });

  fs::create_directories(out_dir);
  const std::vector<std::string> trial_header = {"seed", "beta", "gamma", "n_states", "n_actions",
                                                 "input_distance", "output_distance", "ratio", "pass",
                                                 "skipped"};
  auto write_trial = [](CsvWriter& csv, const ContractionTrial& t) {
    csv << static_cast<std::size_t>(t.seed) << t.beta << t.gamma << t.n_states << t.n_actions
        << t.input_distance << t.output_distance << t.ratio << t.pass << t.skipped;
    csv.end_row();
  };
  CsvWriter all(out_dir / "verify.csv", trial_header);
  CsvWriter bad(out_dir / "counterexamples.csv", trial_header);
  CsvWriter summary(out_dir / "verify_summary.csv",
                    {"beta", "gamma", "trials", "skipped", "passed", "pass_rate", "max_ratio"});
  for (std::size_t b = 0; b < nb; ++b) {
    std::size_t skipped = 0, passed = 0;
    double max_ratio = 0.0;
    for (std::size_t i = 0; i < opts.trials; ++i) {
      const auto& t = trials[b * opts.trials + i];
      write_trial(all, t);
      if (t.skipped) {
        ++skipped;
        continue;
      }
      max_ratio = std::max(max_ratio, t.ratio);
      if (t.pass) ++passed;
      else write_trial(bad, t);
    }
    const std::size_t counted = opts.trials - skipped;
    const double rate = counted ? static_cast<double>(passed) / static_cast<double>(counted) : 1.0;
    summary << opts.betas[b] << opts.gamma << opts.trials << skipped << passed << rate << max_ratio;
    summary.end_row();
    log << "verify: beta=" << opts.betas[b] << " pass rate " << rate << " (" << passed << "/" << counted
        << "), max ratio " << max_ratio << "\n";
  }
  all.close();
  bad.close();
  summary.close();

  CsvWriter fpcsv(out_dir / "fixed_point.csv",
                  {"mdp", "beta", "gamma", "iterations", "converged", "final_residual", "max_ratio_after_burn_in",
                   "random_init_iterations", "random_init_converged", "init_distance"});
  for (const auto& r : fp) {
    const double residual = r.from_zero.trace.empty() ? 0.0 : r.from_zero.trace.back();
    fpcsv << r.mdp << r.beta << opts.fixed_point_gamma << r.from_zero.iterations << r.from_zero.converged
          << residual << r.max_ratio << r.from_random.iterations << r.from_random.converged << r.init_distance;
    fpcsv.end_row();
  }
  fpcsv.close();

  CsvWriter pcsv(out_dir / "probe.csv", {"beta", "trials", "skipped", "max_w1_ratio", "mean_w1_ratio",
                                         "frac_w1_le_one", "max_winf_ratio", "mean_winf_ratio",
                                         "frac_winf_le_one"});
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& p = probes[b];
    pcsv << opts.betas[b] << p.trials << p.skipped << p.max_w1_ratio << p.mean_w1_ratio << p.frac_w1_le_one
         << p.max_winf_ratio << p.mean_winf_ratio << p.frac_winf_le_one;
    pcsv.end_row();
  }
  pcsv.close();
  return kExitOk;
}

}  // namespace riskavi::cli
