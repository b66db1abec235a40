#include "levy/estimator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_band(const SpectralEstimate& s) {
  if (s.values.empty() || s.values.size() % 2 == 0) {
    throw ParameterError("spectral", "band must hold an odd number of samples");
  }
  if (s.half() % 2 != 0) {
    throw GridCoverageError("band must hold an even number of intervals per side");
  }
}

double band_l1(const SpectralEstimate& s) {
  double total = 0.0;
  for (const auto& v : s.values) total += std::abs(v);
  return total * s.step;
}

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double x = std::numbers::pi * t;
  return std::sin(x) / x;
}

}  // namespace

SpectralEstimate spectral_g_hat(const EcfTable& table, int m, double delta) {
  if (m < 1) throw ParameterError("m", "must be >= 1");
  if (!(delta > 0.0)) throw ParameterError("delta", "must be > 0");
  const std::size_t half = table.grid.band_half(m);
  const std::size_t first = table.grid.center() - half;
  SpectralEstimate s;
  s.m = m;
  s.delta = delta;
  s.step = table.grid.step();
  s.source_n = table.n;
  s.values.resize(2 * half + 1);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    s.values[i] = table.theta_hat[first + i] * table.inv_psi_tilde[first + i] / delta;
  }
  // Keep the conjugate symmetry exact.
  for (std::size_t k = 1; k <= half; ++k) s.values[half - k] = std::conj(s.values[half + k]);
  s.values[half] = cplx(s.values[half].real(), 0.0);
  return s;
}

SpectralEstimate spectral_from_function(int m, double delta, double step,
                                        const std::function<cplx(double)>& fn) {
  if (m < 1) throw ParameterError("m", "must be >= 1");
  const FrequencyGrid grid(std::numbers::pi * m, step);
  const std::size_t half = grid.band_half(m);
  SpectralEstimate s;
  s.m = m;
  s.delta = delta;
  s.step = step;
  s.values.resize(2 * half + 1);
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = fn(s.u(i));
  return s;
}

std::vector<double> coefficients(const SpectralEstimate& spectral, int K) {
  if (K < 0) throw ParameterError("K", "must be >= 0");
  check_band(spectral);
  const double scale = 1.0 / (kTwoPi * std::sqrt(static_cast<double>(spectral.m)));
  const double u_first = spectral.u(0);
  const double tolerance = 1e-10 * std::max(1.0, band_l1(spectral) * scale);
  std::vector<double> out(2 * K + 1);
  for (int j = -K; j <= K; ++j) {
    const double omega = -static_cast<double>(j) / spectral.m;
    const cplx a = scale * quad::filon_simpson(spectral.values, u_first, spectral.step, omega);
    if (std::fabs(a.imag()) > tolerance) {
      throw SymmetryError("coefficient " + std::to_string(j) +
                          " has imaginary residue " + std::to_string(a.imag()));
    }
    out[j + K] = a.real();
  }
  return out;
}

std::vector<double> reconstruct(const SpectralEstimate& spectral, std::span<const double> x) {
  check_band(spectral);
  const double u_first = spectral.u(0);
  const double tolerance = 1e-8 * std::max(1.0, band_l1(spectral) / kTwoPi);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx v = quad::filon_simpson(spectral.values, u_first, spectral.step, -x[i]) / kTwoPi;
    if (std::fabs(v.imag()) > tolerance) {
      throw SymmetryError("reconstruction at x = " + std::to_string(x[i]) +
                          " has imaginary residue " + std::to_string(v.imag()));
    }
    out[i] = v.real();
  }
  return out;
}

std::vector<double> coefficient_sum(std::span<const double> coeffs, int m,
                                    std::span<const double> x) {
  if (coeffs.size() % 2 == 0) throw ParameterError("coefficients", "need 2K+1 values");
  const int K = static_cast<int>(coeffs.size() / 2);
  const double root_m = std::sqrt(static_cast<double>(m));
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double total = 0.0;
    for (int j = -K; j <= K; ++j) total += coeffs[j + K] * root_m * sinc(m * x[i] - j);
    out[i] = total;
  }
  return out;
}

ProjectionEstimate project(const SpectralEstimate& spectral, std::span<const double> x, int K) {
  ProjectionEstimate p;
  p.spectral = spectral;
  p.K = K < 0 ? 32 * spectral.m : K;
  p.coefficients = coefficients(spectral, p.K);
  p.x_grid.assign(x.begin(), x.end());
  p.g_values = reconstruct(spectral, x);
  return p;
}

double empirical_norm(const SpectralEstimate& spectral) {
  check_band(spectral);
  std::vector<double> energy(spectral.values.size());
  for (std::size_t i = 0; i < energy.size(); ++i) energy[i] = std::norm(spectral.values[i]);
  return quad::simpson_band(energy, spectral.half(), spectral.half(), spectral.step) / kTwoPi;
}

double contrast(const SpectralEstimate& spectral) { return -empirical_norm(spectral); }

double mise_against_truth(const SpectralEstimate& spectral, const ModelSpec& spec) {
  check_band(spectral);
  std::vector<double> err(spectral.values.size());
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] = std::norm(spectral.values[i] - g_star_true(spec, spectral.u(i)));
  }
  const double band = quad::simpson_band(err, spectral.half(), spectral.half(), spectral.step);
  return (band + tail_energy(spec, spectral.m)) / kTwoPi;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace levy
