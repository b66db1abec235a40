#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/models.hpp"

namespace levy {

/// Spectral estimate of g* on [-pi m, pi m]: theta_hat / (delta psi_tilde),
/// zero wherever the truncation indicator vanishes.
struct SpectralEstimate {
  int m = 1;
  double delta = 1.0;
  double step = kDefaultGridStep;
  /// values[i] at u = (i - half) * step, i = 0..2*half.
  std::vector<cplx> values;
  std::size_t source_n = 0;

  std::size_t half() const noexcept { return (values.size() - 1) / 2; }
  double u(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(half())) * step;
  }
};

/// Spatial estimate built from a spectral estimate.
struct ProjectionEstimate {
  SpectralEstimate spectral;
  int K = 0;
  /// coefficients[j + K] = a_hat_{m,j}, |j| <= K.
  std::vector<double> coefficients;
  std::vector<double> x_grid;
  std::vector<double> g_values;
};

SpectralEstimate spectral_g_hat(const EcfTable& table, int m, double delta);

/// Samples `fn` on the band grid of (m, step). Used for analytic references.
SpectralEstimate spectral_from_function(int m, double delta, double step,
                                        const std::function<cplx(double)>& fn);

/// a_hat_{m,j} = (1/(2 pi sqrt m)) * integral over the band of
/// ghat*(u) e^{-iuj/m} du, for |j| <= K. Throws SymmetryError when an
/// imaginary residue exceeds 1e-10.
std::vector<double> coefficients(const SpectralEstimate& spectral, int K);

/// ghat_m(x) = (1/2pi) * integral over the band of e^{-iux} ghat*(u) du.
std::vector<double> reconstruct(const SpectralEstimate& spectral, std::span<const double> x);

/// sum over |j| <= K of a_j sqrt(m) sinc(m x - j).
std::vector<double> coefficient_sum(std::span<const double> coeffs, int m,
                                    std::span<const double> x);

/// Reconstruction plus coefficients (K = 32 m when K < 0).
ProjectionEstimate project(const SpectralEstimate& spectral, std::span<const double> x,
                           int K = -1);

/// ||ghat_m||^2 = (1/2pi) * integral over the band of |ghat*|^2.
double empirical_norm(const SpectralEstimate& spectral);

/// Contrast at its minimizer: -empirical_norm.
double contrast(const SpectralEstimate& spectral);

/// ||g - ghat_m||^2 = (1/2pi) [ integral over the band of |ghat* - g*|^2 + tail_energy(m) ].
double mise_against_truth(const SpectralEstimate& spectral, const ModelSpec& spec);

/// Evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace levy
