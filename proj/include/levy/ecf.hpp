#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "levy/models.hpp"

namespace levy {

inline constexpr double kDefaultGridStep = std::numbers::pi / 64.0;

/// Symmetric uniform frequency grid {-N h, ..., 0, ..., N h}, u_max = N h.
class FrequencyGrid {
 public:
  /// `step` must divide `u_max` into a whole number of intervals.
  FrequencyGrid(double u_max, double step);

  /// Grid covering [-pi m_max, pi m_max].
  static FrequencyGrid for_models(int m_max, double step = kDefaultGridStep);

  double u_max() const noexcept { return static_cast<double>(half_count_) * step_; }
  double step() const noexcept { return step_; }
  std::size_t half_count() const noexcept { return half_count_; }
  std::size_t size() const noexcept { return 2 * half_count_ + 1; }
  std::size_t center() const noexcept { return half_count_; }
  double u(std::size_t index) const noexcept {
    return (static_cast<double>(index) - static_cast<double>(half_count_)) * step_;
  }

  /// Number of grid steps between 0 and pi m. Throws GridCoverageError if
  /// pi m is beyond u_max or is not an even multiple of the step.
  std::size_t band_half(int m) const;

 private:
  std::size_t half_count_;
  double step_;
};

/// Empirical characteristic function tables on one grid.
struct EcfTable {
  FrequencyGrid grid;
  std::vector<cplx> psi_hat;
  std::vector<cplx> theta_hat;
  /// 1/psi_tilde: 1/psi_hat where |psi_hat| > kappa_psi / sqrt(n), else 0.
  std::vector<cplx> inv_psi_tilde;
  double kappa_psi = 1.0;
  std::size_t n = 0;
  /// Sum of Z_k^2 over the sample.
  double sum_squares = 0.0;
};

/// (1/n) sum_k e^{i u Z_k} at every grid point.
std::vector<cplx> eval_psi_hat(const IncrementSample& sample, const FrequencyGrid& grid);

/// (1/n) sum_k Z_k e^{i u Z_k} at every grid point.
std::vector<cplx> eval_theta_hat(const IncrementSample& sample, const FrequencyGrid& grid);

/// Pointwise 1/psi_hat(u) where |psi_hat(u)| > kappa_psi n^{-1/2}, else 0.
std::vector<cplx> truncated_reciprocal(std::span<const cplx> psi_hat, std::size_t n,
                                       double kappa_psi);

EcfTable build_ecf_table(const IncrementSample& sample, const FrequencyGrid& grid,
                         double kappa_psi = 1.0);

/// Simpson quadrature of |1/psi_tilde|^2 over [-pi m, pi m].
double phi_hat(const EcfTable& table, int m);

/// phi_hat(table, m) for m = 0..m_max (entry m), in one pass.
std::vector<double> phi_hat_all(const EcfTable& table, int m_max);

/// Least-squares fit of log|psi_hat(u)| against log sqrt(1 + u^2) over the
/// reliable part of the grid (u >= 1, |psi_hat| above three times the
/// truncation level). Returns the implied decay exponent beta, or NaN when
/// fewer than three points qualify. Diagnostic only.
double suggest_beta_hint(const EcfTable& table, double delta);

}  // namespace levy
