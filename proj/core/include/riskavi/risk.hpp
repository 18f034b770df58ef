#pragma once

// Numerical kernel shared by the agent, the tabular verifier and the CLI:
// quantile fractions, Huber quantile loss, Gaussian KDE over violation costs,
// VaR/CVaR read off the KDE, and the hinge-squared risk penalty.

#include <cstddef>
#include <span>
#include <vector>

namespace riskavi {

/// Quantile estimates of an action-value distribution, one per quantile
/// fraction, in the same order as the TauGrid they were fitted against.
using QuantileSet = std::vector<double>;

/// Midpoint quantile fractions tau_n = (n + 0.5) / N, n = 0..N-1.
class TauGrid {
 public:
  std::size_t size() const noexcept { return taus_.size(); }
  double operator[](std::size_t i) const { return taus_[i]; }
  std::span<const double> values() const noexcept { return taus_; }

 private:
  friend TauGrid make_tau_grid(std::size_t n_tau);
  std::vector<double> taus_;
};

TauGrid make_tau_grid(std::size_t n_tau);

double huber(double m, double kappa);
/// d huber / dm
double huber_derivative(double m, double kappa);

/// Asymmetric Huber loss |tau - 1{m<0}| * huber(m, kappa).
double quantile_huber(double m, double tau, double kappa);
/// d quantile_huber / dm
double quantile_huber_derivative(double m, double tau, double kappa);

enum class QrNormalization {
  mean_both,  ///< 1/N^2: mean over predicted and target quantile indices
  literal,    ///< 1/N prefactor over the double sum
};

struct QrLoss {
  double loss = 0.0;
  std::vector<double> grad;  ///< d loss / d pred[n]; targets are constants
};

/// Quantile regression loss between predicted quantiles and target samples,
/// summed over every (n, j) pair and normalized per `norm`.
QrLoss qr_loss(std::span<const double> pred, std::span<const double> targets,
               const TauGrid& taus, double kappa,
               QrNormalization norm = QrNormalization::mean_both);

enum class BandwidthKind { scott, paper_literal, fixed };

/// How the KDE bandwidth is chosen.
///  - scott:         h = max(sd * B^(-1/5), 1e-3), sd = sample std. dev.
///  - paper_literal: h = B^(0.2)
///  - fixed:         h = value
struct BandwidthRule {
  BandwidthKind kind = BandwidthKind::scott;
  double value = 0.0;

  static BandwidthRule scott() { return {BandwidthKind::scott, 0.0}; }
  static BandwidthRule paper_literal() { return {BandwidthKind::paper_literal, 0.0}; }
  static BandwidthRule fixed(double h) { return {BandwidthKind::fixed, h}; }
};

inline constexpr double kBandwidthFloor = 1e-3;
inline constexpr std::size_t kDefaultKdeGrid = 512;

enum class KernelKind { gaussian };

/// Gaussian kernel density over cost samples, tabulated on a uniform grid
/// spanning [min - 4h, max + 4h].
struct KdeEstimate {
  std::vector<double> samples;
  double bandwidth = 0.0;
  KernelKind kernel = KernelKind::gaussian;
  std::vector<double> grid_x;
  std::vector<double> grid_pdf;

  /// Direct (off-grid) evaluation of the density.
  double pdf(double x) const;
  double lower() const { return grid_x.front(); }
  double upper() const { return grid_x.back(); }
};

/// Fit a KDE. The grid has at least `grid_size` points; it is refined when the
/// spacing would exceed the bandwidth, which keeps the trapezoid integral of
/// the tabulated density within 1e-3 of one.
KdeEstimate kde_fit(std::span<const double> samples, BandwidthRule rule,
                    std::size_t grid_size = kDefaultKdeGrid);

double select_bandwidth(std::span<const double> samples, BandwidthRule rule);

/// Trapezoid integral of the tabulated density.
double kde_mass(const KdeEstimate& est);

double expected_cost(std::span<const double> samples);

/// Smallest grid abscissa whose (normalized) trapezoid CDF reaches beta.
double var_beta(const KdeEstimate& est, double beta);

struct TailEstimate {
  double value = 0.0;
  /// Tail mass beyond VaR fell below 1e-9; `value` is the grid upper bound.
  bool degenerate_tail = false;
};

/// Conditional tail mean above VaR_beta, by trapezoid quadrature on the grid.
TailEstimate cvar_beta(const KdeEstimate& est, double beta);

/// (max(0, rho - c_max))^2
double risk_penalty(double rho, double c_max);
/// d risk_penalty / d rho
double risk_penalty_derivative(double rho, double c_max);

/// W1 between two equal-weight atom sets of the same size.
double wasserstein1_atoms(std::span<const double> a, std::span<const double> b);

struct RiskConfig {
  double beta = 0.9;
  double c_max = 0.1;
  double lambda = 0.5;

  /// Throws std::invalid_argument unless beta, lambda in (0,1), c_max >= 0.
  void validate() const;
};

}  // namespace riskavi
