#include "riskavi/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace riskavi {

namespace {

constexpr double kTailMassFloor = 1e-9;
constexpr std::size_t kMaxKdeGrid = std::size_t{1} << 20;

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0,1), got " + std::to_string(beta));
  }
}

// Normalized cumulative trapezoid integral of the grid density.
std::vector<double> grid_cdf(const KdeEstimate& est) {
  const auto& x = est.grid_x;
  const auto& p = est.grid_pdf;
  std::vector<double> cdf(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (p[i] + p[i - 1]) * (x[i] - x[i - 1]);
  }
  const double total = cdf.back();
  if (total > 0.0) {
    for (double& c : cdf) c /= total;
  }
  return cdf;
}

std::size_t var_index(const std::vector<double>& cdf, double beta) {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), beta);
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

TauGrid make_tau_grid(std::size_t n_tau) {
  if (n_tau == 0) throw std::invalid_argument("make_tau_grid: n_tau must be >= 1");
  TauGrid grid;
  grid.taus_.resize(n_tau);
  const double n = static_cast<double>(n_tau);
  for (std::size_t i = 0; i < n_tau; ++i) {
    grid.taus_[i] = (static_cast<double>(i) + 0.5) / n;
  }
  return grid;
}

double huber(double m, double kappa) {
  const double a = std::abs(m);
  return a <= kappa ? 0.5 * m * m : kappa * (a - 0.5 * kappa);
}

double huber_derivative(double m, double kappa) {
  if (std::abs(m) <= kappa) return m;
  return m > 0.0 ? kappa : -kappa;
}

double quantile_huber(double m, double tau, double kappa) {
  const double weight = std::abs(tau - (m < 0.0 ? 1.0 : 0.0));
  return weight * huber(m, kappa);
}

double quantile_huber_derivative(double m, double tau, double kappa) {
  const double weight = std::abs(tau - (m < 0.0 ? 1.0 : 0.0));
  return weight * huber_derivative(m, kappa);
}

QrLoss qr_loss(std::span<const double> pred, std::span<const double> targets,
               const TauGrid& taus, double kappa, QrNormalization norm) {
  const std::size_t n = taus.size();
  if (pred.size() != n || targets.size() != n) {
    throw std::invalid_argument("qr_loss: pred, targets and taus must have equal size");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("qr_loss: kappa must be positive");

  const double dn = static_cast<double>(n);
  const double scale = norm == QrNormalization::mean_both ? 1.0 / (dn * dn) : 1.0 / dn;

  QrLoss out;
  out.grad.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = taus[i];
    double acc = 0.0;
    double dacc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double m = targets[j] - pred[i];
      acc += quantile_huber(m, tau, kappa);
      // d/d pred = -d/dm
      dacc -= quantile_huber_derivative(m, tau, kappa);
    }
    out.loss += acc;
    out.grad[i] = scale * dacc;
  }
  out.loss *= scale;
  return out;
}

double select_bandwidth(std::span<const double> samples, BandwidthRule rule) {
  const double b = static_cast<double>(samples.size());
  switch (rule.kind) {
    case BandwidthKind::fixed:
      if (!(rule.value > 0.0)) throw std::invalid_argument("kde: fixed bandwidth must be > 0");
      return rule.value;
    case BandwidthKind::paper_literal:
      return std::pow(b, 0.2);
    case BandwidthKind::scott: {
      double sd = 0.0;
      if (samples.size() > 1) {
        const double mean = expected_cost(samples);
        double ss = 0.0;
        for (double s : samples) ss += (s - mean) * (s - mean);
        sd = std::sqrt(ss / (b - 1.0));
      }
      return std::max(sd * std::pow(b, -0.2), kBandwidthFloor);
    }
  }
  throw std::invalid_argument("kde: unknown bandwidth rule");
}

double KdeEstimate::pdf(double x) const {
  const double inv_h = 1.0 / bandwidth;
  const double norm = inv_h / (static_cast<double>(samples.size()) * std::sqrt(2.0 * std::numbers::pi));
  double acc = 0.0;
  for (double s : samples) {
    const double u = (x - s) * inv_h;
    acc += std::exp(-0.5 * u * u);
  }
  return norm * acc;
}

KdeEstimate kde_fit(std::span<const double> samples, BandwidthRule rule, std::size_t grid_size) {
  if (samples.empty()) throw std::invalid_argument("kde_fit: samples must be non-empty");
  if (grid_size < 2) throw std::invalid_argument("kde_fit: grid_size must be >= 2");
  for (double s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("kde_fit: non-finite sample");
  }

  KdeEstimate est;
  est.samples.assign(samples.begin(), samples.end());
  est.bandwidth = select_bandwidth(samples, rule);
  const double h = est.bandwidth;

  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 4.0 * h;
  const double hi = *mx + 4.0 * h;

  std::size_t n = grid_size;
  const double needed = std::ceil((hi - lo) / h) + 1.0;
  if (needed > static_cast<double>(n)) {
    n = static_cast<std::size_t>(std::min(needed, static_cast<double>(kMaxKdeGrid)));
  }

  est.grid_x.resize(n);
  est.grid_pdf.resize(n);
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    est.grid_x[i] = i + 1 == n ? hi : lo + dx * static_cast<double>(i);
  }

  // Sorted samples let each grid point visit only kernels within 9h.
  std::vector<double> sorted(est.samples);
  std::sort(sorted.begin(), sorted.end());
  const double inv_h = 1.0 / h;
  const double norm = inv_h / (static_cast<double>(sorted.size()) * std::sqrt(2.0 * std::numbers::pi));
  const double cutoff = 9.0 * h;
  auto first = sorted.begin();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = est.grid_x[i];
    while (first != sorted.end() && *first < x - cutoff) ++first;
    double acc = 0.0;
    for (auto it = first; it != sorted.end() && *it <= x + cutoff; ++it) {
      const double u = (x - *it) * inv_h;
      acc += std::exp(-0.5 * u * u);
    }
    est.grid_pdf[i] = norm * acc;
  }
  return est;
}

double kde_mass(const KdeEstimate& est) {
  double total = 0.0;
  for (std::size_t i = 1; i < est.grid_x.size(); ++i) {
    total += 0.5 * (est.grid_pdf[i] + est.grid_pdf[i - 1]) * (est.grid_x[i] - est.grid_x[i - 1]);
  }
  return total;
}

double expected_cost(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("expected_cost: samples must be non-empty");
  double acc = 0.0;
  for (double s : samples) acc += s;
  return acc / static_cast<double>(samples.size());
}

double var_beta(const KdeEstimate& est, double beta) {
  check_beta(beta);
  const auto cdf = grid_cdf(est);
  return est.grid_x[var_index(cdf, beta)];
}

TailEstimate cvar_beta(const KdeEstimate& est, double beta) {
  check_beta(beta);
  const auto cdf = grid_cdf(est);
  const std::size_t k = var_index(cdf, beta);

  const auto& x = est.grid_x;
  const auto& p = est.grid_pdf;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = k + 1; i < x.size(); ++i) {
    const double w = 0.5 * (x[i] - x[i - 1]);
    num += w * (x[i] * p[i] + x[i - 1] * p[i - 1]);
    den += w * (p[i] + p[i - 1]);
  }
  if (den < kTailMassFloor) return {est.upper(), true};
  return {num / den, false};
}

double risk_penalty(double rho, double c_max) {
  const double excess = std::max(0.0, rho - c_max);
  return excess * excess;
}

double risk_penalty_derivative(double rho, double c_max) {
  return 2.0 * std::max(0.0, rho - c_max);
}

double wasserstein1_atoms(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("wasserstein1_atoms: atom sets must be non-empty and of equal size");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) acc += std::abs(sa[i] - sb[i]);
  return acc / static_cast<double>(sa.size());
}

void RiskConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("risk.beta must lie in (0,1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("risk.lambda must lie in (0,1)");
  if (!(c_max >= 0.0) || !std::isfinite(c_max)) throw std::invalid_argument("risk.c_max must be >= 0");
}

}  // namespace riskavi
