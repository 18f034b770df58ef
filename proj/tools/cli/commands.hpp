#pragma once

// The five riskavi subcommands as library functions. Each writes its CSVs
// into an output directory and returns a process exit code; diagnostics go
// to `log`.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cli/run_config.hpp"

namespace riskavi::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     ///< I/O error, corrupt checkpoint, failed sweep cell
  kExitConfig = 2,      ///< malformed config or invalid value
  kExitNumeric = 3,     ///< NaN/Inf during training
};

/// Run fn(0..n-1) on up to `jobs` threads. Each index is visited once; the
/// caller stores results by index so output order never depends on timing.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// ---- train ----------------------------------------------------------------

/// Writes config.txt, train_log.csv, episodes.csv, train_summary.csv and
/// checkpoint.bin (plus checkpoints/step_<n>.bin when agent.checkpoint_every
/// is set). On a numeric failure writes failure.txt and returns kExitNumeric.
int cmd_train(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

// ---- eval -----------------------------------------------------------------

struct EvalOptions {
  std::vector<std::filesystem::path> checkpoints;
  std::vector<std::uint64_t> seeds = {0, 5, 10, 15, 20};
  long episodes_per_seed = 20;
  bool traces = false;
  /// Add a uniform-random policy row (loss columns left empty).
  bool random_baseline = false;
  std::size_t jobs = 1;
};

/// Writes eval_summary.csv, eval_episodes.csv and optionally traces.csv.
/// The environment is rebuilt from each checkpoint's stored config.
int cmd_eval(const EvalOptions& opts, const std::filesystem::path& out_dir, std::ostream& log);

/// goals / max(goals) * 100 per row; 100 for every row when all are zero.
std::vector<double> normalized_success(const std::vector<long>& goals);

// ---- pareto ---------------------------------------------------------------

struct ParetoOptions {
  std::vector<double> betas = {0.9, 0.95};
  std::vector<double> lambdas = {0.1, 0.25, 0.5, 0.75, 0.9};
  std::size_t jobs = 1;
};

struct ParetoPoint {
  double quantile_loss = 0.0;
  double risk_loss = 0.0;
  bool ok = true;
};

/// Non-dominated flags: a point is dropped when some other successful point
/// has strictly smaller quantile and risk loss. Failed points are never on
/// the front.
std::vector<bool> pareto_front(const std::vector<ParetoPoint>& points);

/// Trains rho_qravi for every (beta, lambda) cell and writes pareto.csv.
/// Returns kExitFailure if any cell failed (the sweep still completes).
int cmd_pareto(const RunConfig& cfg, const ParetoOptions& opts, const std::filesystem::path& out_dir,
               std::ostream& log);

// ---- kde-demo -------------------------------------------------------------

/// Pareto(shape) truncated to [lo, 1]: heavy right tail on (0, 1].
struct TruncatedPareto {
  double lo = 0.05;
  double shape = 1.5;

  double cdf(double x) const;
  double quantile(double q) const;
  /// Closed-form conditional tail mean above the beta-quantile.
  double cvar(double beta) const;
};

struct KdeDemoOptions {
  std::vector<std::size_t> sizes = {100, 1000, 10000};
  std::vector<double> betas = {0.9, 0.95};
  double bandwidth = 0.3;
  /// When set, the kernel width is bandwidth * sample std. dev. instead of
  /// bandwidth itself.
  bool bandwidth_is_sd_factor = false;
  std::size_t resamples = 20;
  std::uint64_t seed = 0;
  /// Tail comparison against a fitted normal on N(0.06, 0.1^2) cut at 0.
  std::vector<double> tail_betas = {0.9, 0.95, 0.99};
  std::size_t tail_samples = 10000;
};

struct KdeDemoRow {
  std::size_t samples = 0;
  double beta = 0.0;
  double true_cvar = 0.0;
  double mean_estimate = 0.0;
  double mean_abs_error = 0.0;
  double std_abs_error = 0.0;
};

std::vector<KdeDemoRow> kde_convergence(const KdeDemoOptions& opts);

/// Writes kde_demo.csv and kde_tail.csv.
int cmd_kde_demo(const KdeDemoOptions& opts, const std::filesystem::path& out_dir, std::ostream& log);

// ---- verify ---------------------------------------------------------------

struct VerifyOptions {
  std::size_t trials = 1000;
  std::vector<double> betas = {0.9, 0.95};
  double gamma = 0.99;
  std::uint64_t seed = 0;
  std::size_t probe_trials = 10000;
  std::size_t fixed_point_mdps = 20;
  double fixed_point_gamma = 0.9;
  double fixed_point_tol = 1e-6;
  std::size_t fixed_point_max_iter = 500;
  /// Ratios are checked over the last (1 - burn_in_fraction) of the trace.
  double burn_in_fraction = 0.5;
  std::size_t jobs = 1;
};

/// Largest successive-distance ratio trace[i] / trace[i-1] past the burn-in.
double max_ratio_after_burn_in(const std::vector<double>& trace, double burn_in_fraction);

/// Seed of campaign trial i.
std::uint64_t trial_seed(std::uint64_t base, std::size_t i);

/// Writes verify.csv, verify_summary.csv, counterexamples.csv,
/// fixed_point.csv and probe.csv. Contraction failures are data, not errors:
/// the exit code is non-zero only for invalid options.
int cmd_verify(const VerifyOptions& opts, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace riskavi::cli
