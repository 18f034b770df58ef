// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// statistic, its limit and the wall time. Exit status is non-zero when any
// criterion fails, unless every failing id was passed via --expect-fail
// (known failures are still printed as FAIL).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "riskavi/agent.hpp"
#include "riskavi/checkpoint.hpp"
#include "riskavi/quantile_net.hpp"
#include "riskavi/risk.hpp"
#include "riskavi/tabular.hpp"

#ifdef RISKAVI_HAVE_CLI
#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#endif

namespace fs = std::filesystem;
using namespace riskavi;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Result()> run;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path g_workdir = "acceptance_tmp";

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = g_workdir / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t col(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("missing CSV column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

// ---- 1 --------------------------------------------------------------------

Result quantile_bandit() {
  // Stationary bandit: every update draws a batch of costs from a fixed
  // 4-atom law and regresses a bias-only quantile head onto it.
  const std::vector<double> atoms = {0.0, 1.0, 2.0, 4.0};
  const std::vector<double> probs = {0.1, 0.4, 0.3, 0.2};
  const std::size_t n_tau = 32;
  const auto taus = make_tau_grid(n_tau);
  std::vector<double> truth(n_tau);
  for (std::size_t n = 0; n < n_tau; ++n) {
    double c = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      c += probs[k];
      if (c >= taus[n]) {
        truth[n] = atoms[k];
        break;
      }
    }
  }

  NetworkShape shape;
  shape.obs_dim = 1;
  shape.hidden = {};
  shape.n_actions = 1;
  shape.n_tau = n_tau;
  NetworkParams params = init_network(shape, 1);
  OptimizerState opt;
  opt.kind = OptimizerKind::adam;
  opt.lr = 1e-3;
  const double kappa = 0.01;
  const std::vector<double> obs = {1.0};
  Rng rng(2024);
  std::vector<double> targets(n_tau);
  for (int it = 0; it < 50'000; ++it) {
    for (auto& t : targets) {
      const double u = rng.uniform();
      double c = 0.0;
      t = atoms.back();
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        c += probs[k];
        if (u < c) {
          t = atoms[k];
          break;
        }
      }
    }
    const RowMajorMatrix q = forward(params, obs);
    const std::vector<double> pred(q.data(), q.data() + n_tau);
    const auto loss = qr_loss(pred, targets, taus, kappa);
    RowMajorMatrix g(1, static_cast<Eigen::Index>(n_tau));
    for (std::size_t n = 0; n < n_tau; ++n) g(0, static_cast<Eigen::Index>(n)) = loss.grad[n];
    step(params, backward(params, obs, g), opt);
  }
  const RowMajorMatrix q = forward(params, obs);
  const std::vector<double> learned(q.data(), q.data() + n_tau);
  const double w1 = wasserstein1_atoms(learned, truth);
  return {w1 < 0.05, "W1(learned, analytic quantiles) = " + fmt("%.4g", w1) + " (limit < 0.05)"};
}

// ---- 2 --------------------------------------------------------------------

#ifdef RISKAVI_HAVE_CLI
Result kde_convergence_check() {
  cli::KdeDemoOptions opts;  // B = {100, 1000, 10000}, h = 0.3, beta = {0.9, 0.95}, 20 resamples
  const auto rows = cli::kde_convergence(opts);
  bool pass = true;
  std::string detail;
  for (double beta : opts.betas) {
    double small = 0.0, large = 0.0;
    for (const auto& r : rows) {
      if (r.beta != beta) continue;
      if (r.samples == 100) small = r.mean_abs_error;
      if (r.samples == 10000) large = r.mean_abs_error;
    }
    pass = pass && large < small;
    detail += "beta=" + fmt("%.2f", beta) + ": err(B=100)=" + fmt("%.4f", small) + " err(B=1e4)=" +
              fmt("%.4f", large) + "; ";
  }
  // Context only: the same demo with the width read as 0.3 x sample std.
  opts.bandwidth_is_sd_factor = true;
  const auto scaled = cli::kde_convergence(opts);
  double s_small = 0.0, s_large = 0.0;
  for (const auto& r : scaled) {
    if (r.beta != opts.betas.front()) continue;
    if (r.samples == 100) s_small = r.mean_abs_error;
    if (r.samples == 10000) s_large = r.mean_abs_error;
  }
  detail += "[info: with h = 0.3*sd, beta=0.90 err " + fmt("%.4f", s_small) + " -> " + fmt("%.4f", s_large) + "]";
  return {pass, detail};
}
#endif

// ---- 3 --------------------------------------------------------------------

Result cvar_oracles() {
  Rng rng(3);
  std::vector<double> u(10'000);
  for (auto& x : u) x = rng.uniform();
  const auto est = kde_fit(u, BandwidthRule::scott());
  bool pass = true;
  std::string detail;
  for (double beta : {0.5, 0.9, 0.95}) {
    const double got = cvar_beta(est, beta).value;
    const double want = (1.0 + beta) / 2.0;
    pass = pass && std::abs(got - want) <= 0.05;
    detail += "CVaR_" + fmt("%.2f", beta) + "=" + fmt("%.4f", got) + " vs " + fmt("%.3f", want) + "; ";
  }
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> atoms(8), w(8);
    double sum = 0.0;
    for (auto& a : atoms) a = rng.uniform(-2.0, 3.0);
    for (auto& x : w) sum += (x = rng.exponential());
    for (auto& x : w) x /= sum;
    const auto d = make_distribution(atoms, w);
    for (double beta : {0.1, 0.5, 0.9, 0.95, 0.99}) {
      const double a = cvar_finite(d, beta);
      const double b = oracle::cvar_by_enumeration(d.atoms, d.probs, beta);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  }
  // "Exact" up to summation order.
  pass = pass && worst <= 1e-12;
  detail += "cvar_finite vs enumeration max rel diff " + fmt("%.2g", worst) + " (limit 1e-12)";
  return {pass, detail};
}

// ---- 4 --------------------------------------------------------------------

#ifdef RISKAVI_HAVE_CLI
Result contraction_campaign() {
  cli::VerifyOptions opts;  // 1000 trials, beta {0.9, 0.95}, gamma 0.99, 1e4 probe pairs
  opts.fixed_point_mdps = 0;
  opts.jobs = 4;
  const fs::path dir = fresh_dir("verify");
  std::ostringstream log;
  cli::cmd_verify(opts, dir, log);

  const auto trials = read_csv(dir / "verify.csv");
  const auto bad = read_csv(dir / "counterexamples.csv");
  std::size_t failing = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i][col(trials[0], "pass")] == "0" && trials[i][col(trials[0], "skipped")] == "0") ++failing;
  }
  const bool serialized = bad.size() - 1 == failing;

  std::string detail;
  const auto summary = read_csv(dir / "verify_summary.csv");
  for (std::size_t i = 1; i < summary.size(); ++i) {
    detail += "beta=" + summary[i][col(summary[0], "beta")] + " W1 pass rate " +
              summary[i][col(summary[0], "pass_rate")] + " max ratio " +
              fmt("%.3f", std::stod(summary[i][col(summary[0], "max_ratio")])) + "; ";
  }
  const auto probe = read_csv(dir / "probe.csv");
  double worst_winf = 0.0;
  for (std::size_t i = 1; i < probe.size(); ++i) {
    worst_winf = std::max(worst_winf, std::stod(probe[i][col(probe[0], "max_winf_ratio")]));
  }
  const bool winf_ok = worst_winf <= 1.0 + 1e-9;
  detail += "W-inf probe max ratio 1+" + fmt("%.2g", worst_winf - 1.0) + " (limit 1+1e-9); " +
            std::to_string(failing) + " W1 violations serialized to counterexamples.csv";
  return {winf_ok && serialized, detail};
}
#endif

// ---- 5 --------------------------------------------------------------------

Result fixed_point() {
  const double gamma = 0.9, tol = 1e-6;
  const std::size_t max_iter = 500;
  const CostMap psi;
  bool pass = true;
  std::size_t worst_iters = 0;
  double worst_ratio = 0.0, worst_gap = 0.0;
  for (double beta : {0.9, 0.95}) {
    for (std::uint64_t m = 0; m < 20; ++m) {
      Rng rng(derive_seed(555, m));
      const auto mdp = random_mdp(5, 3, gamma, rng);
      const auto a = fixed_point_iterate(mdp, beta, psi, tol, max_iter);
      const auto b = fixed_point_iterate(mdp, beta, psi, tol, max_iter, random_zmap(mdp, 8, -3.0, 3.0, rng));
      pass = pass && a.converged && b.converged;
      worst_iters = std::max({worst_iters, a.iterations, b.iterations});
#ifdef RISKAVI_HAVE_CLI
      const double ratio = cli::max_ratio_after_burn_in(a.trace, 0.5);
#else
      double ratio = 0.0;
      for (std::size_t i = std::max<std::size_t>(1, a.trace.size() / 2); i < a.trace.size(); ++i) {
        if (a.trace[i - 1] > 1e-12) ratio = std::max(ratio, a.trace[i] / a.trace[i - 1]);
      }
#endif
      worst_ratio = std::max(worst_ratio, ratio);
      worst_gap = std::max(worst_gap, sup_w1(a.z, b.z));
    }
  }
  pass = pass && worst_ratio <= gamma + 0.01 && worst_gap < 2 * tol;
  return {pass, "gamma=0.9, 40 runs: max iterations " + std::to_string(worst_iters) +
                    " (limit 500), max ratio after burn-in " + fmt("%.4f", worst_ratio) +
                    " (limit 0.91), max init gap " + fmt("%.2g", worst_gap) + " (limit 2e-6)"};
}

// ---- 6 --------------------------------------------------------------------

std::vector<Transition> random_batch(std::size_t n, std::size_t obs_dim, Rng& rng) {
  std::vector<Transition> batch(n);
  for (auto& t : batch) {
    t.obs.resize(obs_dim);
    t.next_obs.resize(obs_dim);
    for (auto& x : t.obs) x = rng.uniform(-1.0, 1.0);
    for (auto& x : t.next_obs) x = rng.uniform(-1.0, 1.0);
    t.action = static_cast<std::size_t>(rng.below(kNumActions));
    t.g = rng.uniform(-0.05, 0.05);
    t.cost = rng.uniform() < 0.5 ? rng.uniform() : 0.0;
    t.done = rng.uniform() < 0.2;
  }
  return batch;
}

Result gradient_check() {
  EnvConfig env;
  env.lidar_bins = 2;  // obs_dim 10
  Rng rng(66);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int net = 0; net < 20; ++net) {
    for (auto v : {Variant::avi, Variant::qr_avi, Variant::e_qravi, Variant::rho_qravi}) {
      AgentConfig cfg;
      cfg.variant = v;
      cfg.n_tau = 4;
      cfg.batch = 8;
      cfg.kappa = 1.0;
      cfg.net.hidden = {6, 5};
      const auto shape = agent_network_shape(cfg, env);
      auto online = init_network(shape, rng.next_u64());
      for (std::size_t l = 0; l < online.num_layers(); ++l) {
        for (auto& b : online.bias(l)) b = rng.uniform(-0.1, 0.1);
      }
      const auto target = init_network(shape, rng.next_u64());
      const auto batch = random_batch(cfg.batch, shape.obs_dim, rng);
      const auto targets = compute_targets(target, batch, cfg.gamma);
      const auto lb = compute_loss(online, batch, targets, cfg);
      auto f = [&](const std::vector<double>& flat) {
        NetworkParams p(shape);
        std::copy(flat.begin(), flat.end(), p.data().begin());
        return compute_loss(p, batch, targets, cfg).total;
      };
      const std::vector<double> flat(online.data().begin(), online.data().end());
      for (std::size_t i = 0; i < flat.size(); ++i) {
        const double fd = oracle::central_difference(f, flat, i, 1e-6);
        const double an = lb.grads.data()[i];
        // Relative error with a 1e-6 magnitude floor for near-zero entries.
        worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(an), std::abs(fd), 1e-6}));
        ++checked;
      }
    }
  }
  return {worst < 1e-4, std::to_string(checked) + " partials over 20 nets x 4 variants, max rel err " +
                            fmt("%.2g", worst) + " (limit 1e-4)"};
}

// ---- 7 --------------------------------------------------------------------

Result composite_identity() {
  EnvConfig env;
  env.lidar_bins = 2;
  Rng rng(77);
  double worst = 0.0;
  bool risk_ok = true;
  int active = 0, inactive = 0;
  for (int trial = 0; trial < 40; ++trial) {
    AgentConfig qr;
    qr.variant = Variant::qr_avi;
    qr.n_tau = 8;
    qr.batch = 32;
    qr.net.hidden = {16, 8};
    const auto shape = agent_network_shape(qr, env);
    const auto online = init_network(shape, rng.next_u64());
    const auto target = init_network(shape, rng.next_u64());
    auto batch = random_batch(qr.batch, shape.obs_dim, rng);
    // Half the batches stay under c_max so both sides of the hinge are hit.
    if (trial % 2 == 0) {
      for (auto& t : batch) t.cost *= 0.05;
    }
    const auto targets = compute_targets(target, batch, qr.gamma);
    const auto base = compute_loss(online, batch, targets, qr);
    for (double lambda : {0.1, 0.5, 0.9}) {
      AgentConfig rho = qr;
      rho.variant = Variant::rho_qravi;
      rho.risk.lambda = lambda;
      const auto lb = compute_loss(online, batch, targets, rho);
      for (std::size_t i = 0; i < lb.grads.data().size(); ++i) {
        worst = std::max(worst, std::abs(lb.grads.data()[i] - (1.0 - lambda) * base.grads.data()[i]));
      }
      risk_ok = risk_ok && lb.risk >= 0.0 && ((lb.risk == 0.0) == (lb.rho_hat <= rho.risk.c_max));
      (lb.rho_hat <= rho.risk.c_max ? inactive : active)++;
    }
  }
  const bool pass = worst <= 1e-12 && risk_ok && active > 0 && inactive > 0;
  return {pass, "max |g_rho - (1-lambda) g_qr| = " + fmt("%.2g", worst) + " (limit 1e-12); risk_loss >= 0 and "
                    "zero iff rho <= c_max: " + (risk_ok ? "yes" : "no") + " (" + std::to_string(active) +
                    " above, " + std::to_string(inactive) + " below c_max)"};
}

// ---- 8 --------------------------------------------------------------------

#ifdef RISKAVI_HAVE_CLI
Result smoke_training() {
  cli::RunConfig cfg = cli::default_config(cli::Scale::smoke);
  cfg.agent.variant = Variant::rho_qravi;
  cfg.agent.risk.beta = 0.9;
  cfg.agent.risk.lambda = 0.5;
  cfg.agent.seed = 0;
  std::ostringstream log;
  const fs::path root = fresh_dir("smoke");
  const int rc = cli::cmd_train(cfg, root / "rho_qravi", log);
  if (rc != cli::kExitOk) return {false, "training exited with code " + std::to_string(rc) + ": " + log.str()};

  const auto rows = read_csv(root / "rho_qravi" / "train_log.csv");
  std::vector<double> q;
  for (std::size_t i = 1; i < rows.size(); ++i) q.push_back(std::stod(rows[i][col(rows[0], "quantile_loss")]));
  const auto smooth = running_mean(q, std::max<std::size_t>(1, q.size() / 20));
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  const double final_loss = smooth.back();
  const bool loss_ok = final_loss <= 0.5 * peak;

  const std::vector<std::uint64_t> seeds = {0, 5, 10, 15, 20};
  const auto ckpt_path = root / "rho_qravi" / "checkpoint.bin";
  const auto greedy = evaluate(load_checkpoint(ckpt_path).online, seeds, 20, cfg.env, false, 4);
  const auto random = evaluate_policy(random_policy(), seeds, 20, cfg.env, false, 4);
  const bool goals_ok = greedy.total_goals > random.total_goals;

  // Table 3 style comparison across variants, reported only.
  cli::EvalOptions eval;
  eval.seeds = seeds;
  eval.jobs = 4;
  eval.random_baseline = true;
  eval.checkpoints.push_back(ckpt_path);
  for (auto v : {Variant::qr_avi, Variant::e_qravi}) {
    cli::RunConfig other = cfg;
    other.agent.variant = v;
    if (cli::cmd_train(other, root / to_string(v), log) == cli::kExitOk) {
      eval.checkpoints.push_back(root / to_string(v) / "checkpoint.bin");
    }
  }
  cli::cmd_eval(eval, root / "eval", log);
  std::string ordering;
  const auto summary = read_csv(root / "eval" / "eval_summary.csv");
  for (std::size_t i = 1; i < summary.size(); ++i) {
    ordering += summary[i][col(summary[0], "variant")] + "=" + summary[i][col(summary[0], "total_goals")] + " ";
  }

  return {loss_ok && goals_ok,
          "final running-mean L_QR " + fmt("%.3g", final_loss) + " = " + fmt("%.0f%%", 100.0 * final_loss / peak) +
              " of peak (limit 50%); greedy goals " + std::to_string(greedy.total_goals) + " vs random " +
              std::to_string(random.total_goals) + "; [info: goals " + ordering + "]"};
}
#endif

// ---- 9 --------------------------------------------------------------------

#ifdef RISKAVI_HAVE_CLI
Result determinism() {
  std::ostringstream log;
  cli::RunConfig cfg = cli::default_config(cli::Scale::smoke);
  cfg.agent.total_env_steps = 3000;
  cfg.agent.checkpoint_every = 1500;
  std::vector<std::string> mismatches;
  std::size_t compared = 0;
  auto compare = [&](const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) {
        mismatches.push_back(entry.path().filename().string());
      }
    }
  };

  const fs::path t1 = fresh_dir("det_train_1"), t2 = fresh_dir("det_train_2");
  cli::cmd_train(cfg, t1, log);
  cli::cmd_train(cfg, t2, log);
  compare(t1, t2);
  if (slurp(t1 / "checkpoint.bin") != slurp(t2 / "checkpoint.bin")) mismatches.push_back("checkpoint.bin");

  cli::EvalOptions eval;
  eval.checkpoints = {t1 / "checkpoint.bin"};
  eval.episodes_per_seed = 3;
  eval.traces = true;
  eval.random_baseline = true;
  const fs::path e1 = fresh_dir("det_eval_1"), e2 = fresh_dir("det_eval_2");
  cli::cmd_eval(eval, e1, log);
  eval.jobs = 4;
  cli::cmd_eval(eval, e2, log);
  compare(e1, e2);

  cli::VerifyOptions verify;
  verify.trials = 300;
  verify.probe_trials = 1000;
  verify.fixed_point_mdps = 4;
  const fs::path v1 = fresh_dir("det_verify_1"), v2 = fresh_dir("det_verify_2");
  cli::cmd_verify(verify, v1, log);
  verify.jobs = 4;
  cli::cmd_verify(verify, v2, log);
  compare(v1, v2);

  std::string detail = std::to_string(compared) + " CSV files compared across train/eval/verify reruns";
  if (!mismatches.empty()) {
    detail += "; differing:";
    for (const auto& m : mismatches) detail += " " + m;
  }
  return {mismatches.empty() && compared >= 11, detail};
}
#endif

// ---- 10 -------------------------------------------------------------------

Result schedules() {
  AgentConfig cfg;  // Table 2 defaults
  const long decay = cfg.resolved_eps_decay_steps();
  const bool eps_ok = epsilon(0, cfg) == 1.0 && epsilon(decay, cfg) == 0.05 && epsilon(decay + 1, cfg) == 0.05 &&
                      epsilon(cfg.total_env_steps, cfg) == 0.05;
  const auto taus = make_tau_grid(32);
  const bool tau_ok = taus[0] == 0.015625 && taus[31] == 0.984375;
  return {eps_ok && tau_ok, "epsilon(0)=" + fmt("%g", epsilon(0, cfg)) + " epsilon(decay)=" +
                                fmt("%g", epsilon(decay, cfg)) + "; tau endpoints " + fmt("%.6f", taus[0]) + " / " +
                                fmt("%.6f", taus[31])};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected_failures;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      g_workdir = argv[++i];
    } else if (a == "--expect-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string id;
      while (std::getline(ss, id, ',')) expected_failures.insert(std::stoi(id));
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string id;
      while (std::getline(ss, id, ',')) only.insert(std::stoi(id));
    } else {
      std::cerr << "usage: acceptance [--workdir DIR] [--expect-fail ID,...] [--only ID,...]\n";
      return 2;
    }
  }
  fs::create_directories(g_workdir);

  std::vector<Criterion> criteria = {
      {1, "quantile regression fixed point", 60, quantile_bandit},
#ifdef RISKAVI_HAVE_CLI
      {2, "CVaR-KDE convergence", 30, kde_convergence_check},
#endif
      {3, "analytic CVaR oracles", 10, cvar_oracles},
#ifdef RISKAVI_HAVE_CLI
      {4, "contraction campaign", 60, contraction_campaign},
#endif
      {5, "fixed point", 30, fixed_point},
      {6, "gradient correctness", 30, gradient_check},
      {7, "composite-loss identity", 0, composite_identity},
#ifdef RISKAVI_HAVE_CLI
      {8, "smoke training", 600, smoke_training},
      {9, "determinism", 0, determinism},
#endif
      {10, "schedules and grids", 0, schedules},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.time_limit_s > 0) {
      timing += fmt(", limit %.0f s", c.time_limit_s);
      if (secs >= c.time_limit_s) {
        r.pass = false;
        r.detail += " [over time limit]";
      }
    }
    const bool known = expected_failures.count(c.id) > 0;
    std::printf("%s %2d %-32s %s (%s)%s\n", r.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), r.detail.c_str(),
                timing.c_str(), !r.pass && known ? " [expected failure, see README]" : "");
    std::fflush(stdout);
    if (!r.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
