#pragma once

// Finite-MDP harness for the risk-sensitive distributional Bellman operator
//
//   (T Z)(x,u) =_D g(x,u) - gamma * CVaR_beta[ psi(Z(x', u')) ],
//   x' ~ P(.|x,u), u' ~ mu(.|x'),
//
// over finitely supported return distributions. Used to check contraction
// in W1, convergence to a unique fixed point, and the Lipschitz behaviour of
// CVaR that the contraction argument relies on.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "riskavi/random.hpp"

namespace riskavi {

/// Atoms with probabilities. Construct through `make_distribution` to get
/// sorted, merged atoms.
struct FiniteDistribution {
  std::vector<double> atoms;
  std::vector<double> probs;

  /// Throws std::invalid_argument unless sizes match, atoms are finite,
  /// probabilities are non-negative and sum to 1 within 1e-12.
  void validate() const;
  std::size_t size() const { return atoms.size(); }
};

/// Sort atoms ascending, merge duplicates, validate.
FiniteDistribution make_distribution(std::vector<double> atoms, std::vector<double> probs);
FiniteDistribution point_mass(double atom);

/// Exact W1 = integral of |F1 - F2| over the merged breakpoints.
double finite_w1(const FiniteDistribution& a, const FiniteDistribution& b);
/// Exact W-infinity = sup over q of |F1^-1(q) - F2^-1(q)|.
double finite_winf(const FiniteDistribution& a, const FiniteDistribution& b);

/// Smallest atom whose CDF reaches beta.
double var_finite(const FiniteDistribution& d, double beta);
/// (1 / (1 - beta)) * integral_beta^1 F^-1(q) dq. The atom straddling the
/// beta-quantile contributes only its share above beta.
double cvar_finite(const FiniteDistribution& d, double beta);

struct FiniteMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  /// kernel[(x * n_actions + u) * n_states + x'] = P(x' | x, u)
  std::vector<double> kernel;
  /// cost[x * n_actions + u] = g(x, u)
  std::vector<double> cost;
  /// policy[x * n_actions + u] = mu(u | x)
  std::vector<double> policy;
  double gamma = 0.9;

  std::size_t pairs() const { return n_states * n_actions; }
  double p(std::size_t x, std::size_t u, std::size_t next) const {
    return kernel[(x * n_actions + u) * n_states + next];
  }
  /// Row-stochastic kernel and policy, gamma in [0,1).
  void validate() const;
};

/// Kernel rows ~ Dirichlet(1), costs ~ U[0,1], uniform policy.
FiniteMdp random_mdp(std::size_t n_states, std::size_t n_actions, double gamma, Rng& rng);

/// Return-distribution map, indexed by x * n_actions + u.
using ZMap = std::vector<FiniteDistribution>;

/// Cost map psi(z) = clamp(z, 0, bound): 1-Lipschitz, bounded, non-negative.
struct CostMap {
  double bound = 1.0;

  double operator()(double z) const;
  FiniteDistribution apply(const FiniteDistribution& d) const;
};

ZMap apply_bellman_risk(const FiniteMdp& mdp, const ZMap& z, double beta, const CostMap& psi);

/// sup over (x,u) of W1 between corresponding entries.
double sup_w1(const ZMap& a, const ZMap& b);

ZMap zero_zmap(const FiniteMdp& mdp);
/// Each entry has 1..max_atoms atoms ~ U[lo, hi] with Dirichlet(1) weights.
ZMap random_zmap(const FiniteMdp& mdp, std::size_t max_atoms, double lo, double hi, Rng& rng);
FiniteDistribution random_distribution(std::size_t max_atoms, double lo, double hi, Rng& rng);

struct ContractionTrial {
  std::uint64_t seed = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double input_distance = 0.0;   ///< sup W1(Z1, Z2)
  double output_distance = 0.0;  ///< sup W1(T Z1, T Z2)
  double ratio = 0.0;
  bool pass = false;
  bool skipped = false;  ///< input distance below 1e-12
};

/// Random MDP and random Z1, Z2 (up to 8 atoms each) drawn from `seed`.
ContractionTrial contraction_trial(std::uint64_t seed, double beta, double gamma,
                                   std::size_t n_states, std::size_t n_actions,
                                   const CostMap& psi = {});

/// Same, for caller-supplied inputs.
ContractionTrial contraction_trial(const FiniteMdp& mdp, const ZMap& z1, const ZMap& z2, double beta,
                                   const CostMap& psi = {});

/// Dimensions used by campaign trial `seed`: states in 1..5, actions in 1..3.
std::pair<std::size_t, std::size_t> campaign_dims(std::uint64_t seed);

struct FixedPointResult {
  ZMap z;              ///< iterate whose residual sup W1(T z, z) is below tol
  std::size_t iterations = 0;
  std::vector<double> trace;  ///< successive sup-W1 distances
  bool converged = false;
};

/// Iterate Z <- T Z from `init` (all-zero point masses by default) until the
/// successive sup-W1 distance drops below tol.
FixedPointResult fixed_point_iterate(const FiniteMdp& mdp, double beta, const CostMap& psi, double tol,
                                     std::size_t max_iter, std::optional<ZMap> init = std::nullopt);

struct ProbeStats {
  std::size_t trials = 0;
  std::size_t skipped = 0;
  double max_w1_ratio = 0.0;
  double mean_w1_ratio = 0.0;
  double frac_w1_le_one = 0.0;
  double max_winf_ratio = 0.0;
  double mean_winf_ratio = 0.0;
  double frac_winf_le_one = 0.0;
};

/// Empirical Lipschitz ratios |CVaR(C1) - CVaR(C2)| / d(C1, C2) under W1 and
/// W-infinity for random pairs of finite cost distributions.
ProbeStats nonexpansiveness_probe(double beta, std::size_t trials, std::uint64_t seed);

}  // namespace riskavi
