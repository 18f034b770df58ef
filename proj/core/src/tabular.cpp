#include "riskavi/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riskavi {

namespace {

constexpr double kProbTolerance = 1e-12;
constexpr double kDegenerateDistance = 1e-12;

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
}

std::vector<double> dirichlet_ones(std::size_t k, Rng& rng) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.exponential();
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

// Sorted (atom, cumulative probability) breakpoints of a quantile function.
std::vector<double> cumulative(const FiniteDistribution& d) {
  std::vector<double> c(d.size());
  std::partial_sum(d.probs.begin(), d.probs.end(), c.begin());
  return c;
}

}  // namespace

void FiniteDistribution::validate() const {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw std::invalid_argument("distribution: atoms and probs must be non-empty and of equal size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i])) throw std::invalid_argument("distribution: non-finite atom");
    if (!(probs[i] >= 0.0)) throw std::invalid_argument("distribution: negative probability");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw std::invalid_argument("distribution: probabilities sum to " + std::to_string(total));
  }
}

FiniteDistribution make_distribution(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.size() != probs.size()) throw std::invalid_argument("distribution: size mismatch");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  FiniteDistribution d;
  for (std::size_t i : order) {
    if (probs[i] == 0.0) continue;
    if (!d.atoms.empty() && d.atoms.back() == atoms[i]) {
      d.probs.back() += probs[i];
    } else {
      d.atoms.push_back(atoms[i]);
      d.probs.push_back(probs[i]);
    }
  }
  d.validate();
  return d;
}

FiniteDistribution point_mass(double atom) { return make_distribution({atom}, {1.0}); }

double finite_w1(const FiniteDistribution& a, const FiniteDistribution& b) {
  // Sweep the merged support; between consecutive breakpoints both CDFs are
  // constant.
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, total = 0.0;
  double x_prev = std::min(a.atoms.front(), b.atoms.front());
  while (i < a.size() || j < b.size()) {
    const double xa = i < a.size() ? a.atoms[i] : INFINITY;
    const double xb = j < b.size() ? b.atoms[j] : INFINITY;
    const double x = std::min(xa, xb);
    total += std::abs(fa - fb) * (x - x_prev);
    if (xa == x) fa += a.probs[i++];
    if (xb == x) fb += b.probs[j++];
    x_prev = x;
  }
  return total;
}

double finite_winf(const FiniteDistribution& a, const FiniteDistribution& b) {
  const auto ca = cumulative(a);
  const auto cb = cumulative(b);
  std::size_t i = 0, j = 0;
  double q_prev = 0.0, worst = 0.0;
  while (i < a.size() && j < b.size()) {
    // Quantile functions equal a.atoms[i] and b.atoms[j] on (q_prev, q].
    const double q = std::min(ca[i], cb[j]);
    if (q > q_prev) worst = std::max(worst, std::abs(a.atoms[i] - b.atoms[j]));
    q_prev = q;
    if (ca[i] <= q) ++i;
    if (cb[j] <= q) ++j;
  }
  return worst;
}

double var_finite(const FiniteDistribution& d, double beta) {
  check_beta(beta);
  double c = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    c += d.probs[i];
    if (c >= beta) return d.atoms[i];
  }
  return d.atoms.back();
}

double cvar_finite(const FiniteDistribution& d, double beta) {
  check_beta(beta);
  const double tail = 1.0 - beta;
  double remaining = tail;
  double acc = 0.0;
  for (std::size_t k = d.size(); k-- > 0 && remaining > 0.0;) {
    const double take = std::min(d.probs[k], remaining);
    acc += take * d.atoms[k];
    remaining -= take;
  }
  // Rounding can leave a sliver of mass unassigned; it belongs to the lowest atom.
  if (remaining > 0.0) acc += remaining * d.atoms.front();
  return acc / tail;
}

void FiniteMdp::validate() const {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("mdp: empty state or action set");
  if (kernel.size() != pairs() * n_states || cost.size() != pairs() || policy.size() != pairs()) {
    throw std::invalid_argument("mdp: array sizes do not match dimensions");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("mdp: gamma must lie in [0,1)");
  for (std::size_t r = 0; r < pairs(); ++r) {
    double row = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) {
      const double p = kernel[r * n_states + s];
      if (!(p >= 0.0)) throw std::invalid_argument("mdp: negative transition probability");
      row += p;
    }
    if (std::abs(row - 1.0) > kProbTolerance) throw std::invalid_argument("mdp: kernel row does not sum to 1");
    if (!std::isfinite(cost[r])) throw std::invalid_argument("mdp: non-finite stage cost");
  }
  for (std::size_t x = 0; x < n_states; ++x) {
    double row = 0.0;
    for (std::size_t u = 0; u < n_actions; ++u) {
      const double p = policy[x * n_actions + u];
      if (!(p >= 0.0)) throw std::invalid_argument("mdp: negative policy probability");
      row += p;
    }
    if (std::abs(row - 1.0) > kProbTolerance) throw std::invalid_argument("mdp: policy row does not sum to 1");
  }
}

FiniteMdp random_mdp(std::size_t n_states, std::size_t n_actions, double gamma, Rng& rng) {
  FiniteMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.kernel.reserve(n_states * n_actions * n_states);
  for (std::size_t r = 0; r < n_states * n_actions; ++r) {
    const auto row = dirichlet_ones(n_states, rng);
    mdp.kernel.insert(mdp.kernel.end(), row.begin(), row.end());
  }
  mdp.cost.resize(n_states * n_actions);
  for (auto& c : mdp.cost) c = rng.uniform();
  mdp.policy.assign(n_states * n_actions, 1.0 / static_cast<double>(n_actions));
  mdp.validate();
  return mdp;
}

double CostMap::operator()(double z) const { return std::clamp(z, 0.0, bound); }

FiniteDistribution CostMap::apply(const FiniteDistribution& d) const {
  std::vector<double> atoms(d.atoms.size());
  std::transform(d.atoms.begin(), d.atoms.end(), atoms.begin(), [this](double z) { return (*this)(z); });
  return make_distribution(std::move(atoms), d.probs);
}

ZMap apply_bellman_risk(const FiniteMdp& mdp, const ZMap& z, double beta, const CostMap& psi) {
  if (z.size() != mdp.pairs()) throw std::invalid_argument("apply_bellman_risk: Z must cover every (x,u)");
  check_beta(beta);

  std::vector<double> risk(mdp.pairs());
  for (std::size_t i = 0; i < mdp.pairs(); ++i) risk[i] = cvar_finite(psi.apply(z[i]), beta);

  ZMap out;
  out.reserve(mdp.pairs());
  std::vector<double> atoms, probs;
  for (std::size_t x = 0; x < mdp.n_states; ++x) {
    for (std::size_t u = 0; u < mdp.n_actions; ++u) {
      atoms.clear();
      probs.clear();
      const double g = mdp.cost[x * mdp.n_actions + u];
      for (std::size_t xn = 0; xn < mdp.n_states; ++xn) {
        const double pt = mdp.p(x, u, xn);
        if (pt == 0.0) continue;
        for (std::size_t un = 0; un < mdp.n_actions; ++un) {
          const double pu = mdp.policy[xn * mdp.n_actions + un];
          if (pu == 0.0) continue;
          atoms.push_back(g - mdp.gamma * risk[xn * mdp.n_actions + un]);
          probs.push_back(pt * pu);
        }
      }
      out.push_back(make_distribution(atoms, probs));
    }
  }
  return out;
}

double sup_w1(const ZMap& a, const ZMap& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_w1: maps differ in size");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, finite_w1(a[i], b[i]));
  return worst;
}

ZMap zero_zmap(const FiniteMdp& mdp) { return ZMap(mdp.pairs(), point_mass(0.0)); }

FiniteDistribution random_distribution(std::size_t max_atoms, double lo, double hi, Rng& rng) {
  const std::size_t k = 1 + static_cast<std::size_t>(rng.below(max_atoms));
  std::vector<double> atoms(k);
  for (auto& a : atoms) a = rng.uniform(lo, hi);
  return make_distribution(std::move(atoms), dirichlet_ones(k, rng));
}

ZMap random_zmap(const FiniteMdp& mdp, std::size_t max_atoms, double lo, double hi, Rng& rng) {
  ZMap z;
  z.reserve(mdp.pairs());
  for (std::size_t i = 0; i < mdp.pairs(); ++i) z.push_back(random_distribution(max_atoms, lo, hi, rng));
  return z;
}

ContractionTrial contraction_trial(const FiniteMdp& mdp, const ZMap& z1, const ZMap& z2, double beta,
                                   const CostMap& psi) {
  ContractionTrial t;
  t.beta = beta;
  t.gamma = mdp.gamma;
  t.n_states = mdp.n_states;
  t.n_actions = mdp.n_actions;
  t.input_distance = sup_w1(z1, z2);
  if (t.input_distance < kDegenerateDistance) {
    t.skipped = true;
    return t;
  }
  t.output_distance = sup_w1(apply_bellman_risk(mdp, z1, beta, psi), apply_bellman_risk(mdp, z2, beta, psi));
  t.ratio = t.output_distance / t.input_distance;
  t.pass = t.ratio <= mdp.gamma + 1e-9;
  return t;
}

ContractionTrial contraction_trial(std::uint64_t seed, double beta, double gamma, std::size_t n_states,
                                   std::size_t n_actions, const CostMap& psi) {
  if (n_states == 0 || n_states > 5 || n_actions == 0 || n_actions > 3) {
    throw std::invalid_argument("contraction_trial: need 1..5 states and 1..3 actions");
  }
  Rng rng(derive_seed(seed, 0xC0DE));
  const FiniteMdp mdp = random_mdp(n_states, n_actions, gamma, rng);
  const ZMap z1 = random_zmap(mdp, 8, -0.5, 1.5, rng);
  const ZMap z2 = random_zmap(mdp, 8, -0.5, 1.5, rng);
  auto t = contraction_trial(mdp, z1, z2, beta, psi);
  t.seed = seed;
  return t;
}

std::pair<std::size_t, std::size_t> campaign_dims(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xD135));
  const auto states = 1 + static_cast<std::size_t>(rng.below(5));
  const auto actions = 1 + static_cast<std::size_t>(rng.below(3));
  return {states, actions};
}

FixedPointResult fixed_point_iterate(const FiniteMdp& mdp, double beta, const CostMap& psi, double tol,
                                     std::size_t max_iter, std::optional<ZMap> init) {
  if (!(tol > 0.0)) throw std::invalid_argument("fixed_point_iterate: tol must be > 0");
  mdp.validate();
  FixedPointResult r;
  r.z = init ? std::move(*init) : zero_zmap(mdp);
  if (r.z.size() != mdp.pairs()) throw std::invalid_argument("fixed_point_iterate: init must cover every (x,u)");

  // r.z holds the iterate after r.iterations applications of the operator.
  for (std::size_t k = 0; k < max_iter; ++k) {
    ZMap next = apply_bellman_risk(mdp, r.z, beta, psi);
    const double d = sup_w1(next, r.z);
    r.trace.push_back(d);
    if (d < tol) {
      r.converged = true;
      return r;
    }
    r.z = std::move(next);
    ++r.iterations;
  }
  return r;
}

ProbeStats nonexpansiveness_probe(double beta, std::size_t trials, std::uint64_t seed) {
  check_beta(beta);
  if (trials == 0) throw std::invalid_argument("nonexpansiveness_probe: trials must be >= 1");
  Rng rng(derive_seed(seed, 0x9E0B));
  ProbeStats s;
  s.trials = trials;
  std::size_t counted = 0, w1_le = 0, winf_le = 0;
  double w1_sum = 0.0, winf_sum = 0.0;

  for (std::size_t i = 0; i < trials; ++i) {
    const FiniteDistribution c1 = random_distribution(8, 0.0, 1.0, rng);
    FiniteDistribution c2;
    if (i % 2 == 0) {
      c2 = random_distribution(8, 0.0, 1.0, rng);
    } else {
      // Local perturbation of c1: small jitter on the atoms.
      std::vector<double> atoms = c1.atoms;
      for (auto& a : atoms) a += rng.uniform(-0.05, 0.05);
      c2 = make_distribution(std::move(atoms), c1.probs);
    }
    const double w1 = finite_w1(c1, c2);
    const double winf = finite_winf(c1, c2);
    if (w1 < kDegenerateDistance || winf < kDegenerateDistance) {
      ++s.skipped;
      continue;
    }
    const double diff = std::abs(cvar_finite(c1, beta) - cvar_finite(c2, beta));
    const double r1 = diff / w1;
    const double rinf = diff / winf;
    ++counted;
    w1_sum += r1;
    winf_sum += rinf;
    s.max_w1_ratio = std::max(s.max_w1_ratio, r1);
    s.max_winf_ratio = std::max(s.max_winf_ratio, rinf);
    // Shifted pairs sit exactly on the bound; allow for rounding.
    if (r1 <= 1.0 + 1e-9) ++w1_le;
    if (rinf <= 1.0 + 1e-9) ++winf_le;
  }
  if (counted > 0) {
    const double n = static_cast<double>(counted);
    s.mean_w1_ratio = w1_sum / n;
    s.mean_winf_ratio = winf_sum / n;
    s.frac_w1_le_one = static_cast<double>(w1_le) / n;
    s.frac_winf_le_one = static_cast<double>(winf_le) / n;
  }
  return s;
}

}  // namespace riskavi
