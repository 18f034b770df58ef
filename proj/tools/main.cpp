// riskavi command-line entry point. Subcommand logic lives in cli/commands.cpp.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "riskavi/errors.hpp"

namespace fs = std::filesystem;
using namespace riskavi;
using namespace riskavi::cli;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string run_id;
  std::string scale;
};

void add_common(CLI::App* sub, Common& c, bool with_scale) {
  sub->add_option("--config", c.config, "key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory (default: $RISKAVI_OUTPUT_ROOT/<run id>)");
  sub->add_option("--run-id", c.run_id, "run id used to name the output directory");
  if (with_scale) {
    sub->add_option("--scale", c.scale, "smoke (2e4 steps, T=200) or full (1e6 steps, T=1000)")
        ->check(CLI::IsMember({"smoke", "full"}));
  }
}

RunConfig resolve(const Common& c, Scale command_default, const std::vector<Override>& overrides) {
  std::optional<Scale> flag;
  if (!c.scale.empty()) flag = parse_scale(c.scale);
  std::optional<fs::path> file;
  if (!c.config.empty()) file = c.config;
  RunConfig cfg = resolve_config(command_default, flag, file, overrides);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (!c.run_id.empty()) cfg.run_id = c.run_id;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<Override> overrides;
  try {
    overrides = extract_overrides(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  CLI::App app{"Risk-regularized quantile-regression action-value iteration"};
  app.require_subcommand(1);
  app.footer("Config keys can be overridden with --section.key value, e.g. --risk.beta 0.95.\n"
             "Output root defaults to $" + std::string(kOutputRootEnv) + " or ./runs.");

  Common common;

  auto* train_cmd = app.add_subcommand("train", "train one agent and write logs and checkpoints");
  add_common(train_cmd, common, true);
  std::string variant;
  std::optional<std::uint64_t> seed;
  train_cmd->add_option("--variant", variant, "avi, qr_avi, e_qravi or rho_qravi");
  train_cmd->add_option("--seed", seed, "agent.seed");

  auto* eval_cmd = app.add_subcommand("eval", "greedy evaluation of one or more checkpoints");
  add_common(eval_cmd, common, false);
  EvalOptions eval_opts;
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoints, "checkpoint file (repeatable)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--seeds", eval_opts.seeds, "evaluation seeds")->delimiter(',');
  eval_cmd->add_option("--episodes", eval_opts.episodes_per_seed, "episodes per seed");
  eval_cmd->add_flag("--traces", eval_opts.traces, "write per-step traces.csv");
  eval_cmd->add_flag("--random-baseline", eval_opts.random_baseline, "add a uniform-random policy row");
  eval_cmd->add_option("--jobs", eval_opts.jobs, "worker threads");

  auto* pareto_cmd = app.add_subcommand("pareto", "(beta, lambda) sweep of terminal losses");
  add_common(pareto_cmd, common, true);
  ParetoOptions pareto_opts;
  pareto_cmd->add_option("--betas", pareto_opts.betas, "CVaR levels")->delimiter(',');
  pareto_cmd->add_option("--lambdas", pareto_opts.lambdas, "risk weights")->delimiter(',');
  pareto_cmd->add_option("--seed", seed, "agent.seed");
  pareto_cmd->add_option("--jobs", pareto_opts.jobs, "worker threads");

  auto* kde_cmd = app.add_subcommand("kde-demo", "KDE CVaR error against an analytic tail");
  add_common(kde_cmd, common, false);
  KdeDemoOptions kde_opts;
  kde_cmd->add_option("--sizes", kde_opts.sizes, "sample sizes B")->delimiter(',');
  kde_cmd->add_option("--betas", kde_opts.betas, "CVaR levels")->delimiter(',');
  kde_cmd->add_option("--bandwidth", kde_opts.bandwidth, "kernel bandwidth h");
  kde_cmd->add_flag("--sd-factor", kde_opts.bandwidth_is_sd_factor,
                    "treat --bandwidth as a multiple of the sample std. dev.");
  kde_cmd->add_option("--resamples", kde_opts.resamples, "independent sample sets per B");
  kde_cmd->add_option("--seed", kde_opts.seed, "base seed");

  auto* verify_cmd = app.add_subcommand("verify", "tabular contraction and fixed-point checks");
  add_common(verify_cmd, common, false);
  VerifyOptions verify_opts;
  verify_cmd->add_option("--trials", verify_opts.trials, "random contraction trials per beta");
  verify_cmd->add_option("--betas", verify_opts.betas, "CVaR levels")->delimiter(',');
  verify_cmd->add_option("--gamma", verify_opts.gamma, "discount for contraction trials");
  verify_cmd->add_option("--seed", verify_opts.seed, "base seed");
  verify_cmd->add_option("--probe-trials", verify_opts.probe_trials, "CVaR nonexpansiveness probes");
  verify_cmd->add_option("--fp-mdps", verify_opts.fixed_point_mdps, "random MDPs for fixed-point iteration");
  verify_cmd->add_option("--fp-gamma", verify_opts.fixed_point_gamma, "discount for fixed-point MDPs");
  verify_cmd->add_option("--fp-tol", verify_opts.fixed_point_tol, "stop when successive sup-W1 distance is below this");
  verify_cmd->add_option("--fp-max-iter", verify_opts.fixed_point_max_iter, "iteration cap");
  verify_cmd->add_option("--burn-in", verify_opts.burn_in_fraction, "fraction of fixed-point iterations skipped");
  verify_cmd->add_option("--jobs", verify_opts.jobs, "worker threads");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train_cmd->parsed()) {
      RunConfig cfg = resolve(common, Scale::full, overrides);
      if (!variant.empty()) set_value(cfg, "agent.variant", variant);
      if (seed) cfg.agent.seed = *seed;
      const auto dir = resolve_output_dir(
          cfg, "train-" + to_string(cfg.agent.variant) + "-seed" + std::to_string(cfg.agent.seed));
      return cmd_train(cfg, dir, std::cerr);
    }
    if (eval_cmd->parsed()) {
      const RunConfig cfg = resolve(common, Scale::full, overrides);
      return cmd_eval(eval_opts, resolve_output_dir(cfg, "eval"), std::cerr);
    }
    if (pareto_cmd->parsed()) {
      RunConfig cfg = resolve(common, Scale::smoke, overrides);
      if (seed) cfg.agent.seed = *seed;
      return cmd_pareto(cfg, pareto_opts, resolve_output_dir(cfg, "pareto"), std::cerr);
    }
    if (kde_cmd->parsed()) {
      const RunConfig cfg = resolve(common, Scale::full, overrides);
      return cmd_kde_demo(kde_opts, resolve_output_dir(cfg, "kde-demo"), std::cerr);
    }
    if (verify_cmd->parsed()) {
      const RunConfig cfg = resolve(common, Scale::full, overrides);
      return cmd_verify(verify_opts, resolve_output_dir(cfg, "verify"), std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CorruptCheckpoint& e) {
    std::cerr << "corrupt checkpoint: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
