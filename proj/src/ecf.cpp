#include "levy/ecf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {
namespace {

// Exact phases are recomputed every kReseed steps; in between, e^{i k h z}
// advances by complex multiplication.
constexpr std::size_t kReseed = 64;

struct HalfSums {
  std::vector<cplx> psi;    // k = 0..N
  std::vector<cplx> theta;  // k = 0..N
};

std::vector<double> sorted_values(const IncrementSample& sample) {
  validate_sample(sample);
  std::vector<double> z = sample.values;
  std::sort(z.begin(), z.end());
  return z;
}

// Direct evaluation of both empirical sums on u_k = k h, k = 0..N. The
// sample is sorted first so every output is invariant under permutation of
// the input.
HalfSums half_sums(std::span<const double> z, double h, std::size_t half_count,
                   bool want_psi, bool want_theta) {
  const std::size_t n = z.size();
  std::vector<double> wr(n), wi(n), sr(n), si(n);
  for (std::size_t j = 0; j < n; ++j) {
    sr[j] = std::cos(h * z[j]);
    si[j] = std::sin(h * z[j]);
  }
  HalfSums out;
  if (want_psi) out.psi.resize(half_count + 1);
  if (want_theta) out.theta.resize(half_count + 1);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t k = 0; k <= half_count; ++k) {
    if (k % kReseed == 0) {
      const double u = static_cast<double>(k) * h;
      for (std::size_t j = 0; j < n; ++j) {
        wr[j] = std::cos(u * z[j]);
        wi[j] = std::sin(u * z[j]);
      }
    }
    double pr[4] = {0, 0, 0, 0}, pi[4] = {0, 0, 0, 0};
    double tr[4] = {0, 0, 0, 0}, ti[4] = {0, 0, 0, 0};
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      for (std::size_t l = 0; l < 4; ++l) {
        pr[l] += wr[j + l];
        pi[l] += wi[j + l];
        tr[l] += z[j + l] * wr[j + l];
        ti[l] += z[j + l] * wi[j + l];
      }
    }
    for (; j < n; ++j) {
      pr[0] += wr[j];
      pi[0] += wi[j];
      tr[0] += z[j] * wr[j];
      ti[0] += z[j] * wi[j];
    }
    if (want_psi) {
      out.psi[k] = cplx((pr[0] + pr[1]) + (pr[2] + pr[3]), (pi[0] + pi[1]) + (pi[2] + pi[3])) *
                   inv_n;
    }
    if (want_theta) {
      out.theta[k] = cplx((tr[0] + tr[1]) + (tr[2] + tr[3]), (ti[0] + ti[1]) + (ti[2] + ti[3])) *
                     inv_n;
    }
    for (std::size_t q = 0; q < n; ++q) {
      const double r = wr[q] * sr[q] - wi[q] * si[q];
      const double i = wr[q] * si[q] + wi[q] * sr[q];
      wr[q] = r;
      wi[q] = i;
    }
  }
  if (want_psi) {
    // psi_hat(0) = 1 and |psi_hat| <= 1 hold exactly, not just up to rounding.
    out.psi[0] = cplx(1.0, 0.0);
    for (auto& v : out.psi) {
      const double a = std::abs(v);
      if (a > 1.0) v /= a;
    }
  }
  return out;
}

std::vector<cplx> mirror(const std::vector<cplx>& half) {
  const std::size_t N = half.size() - 1;
  std::vector<cplx> full(2 * N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    full[N + k] = half[k];
    full[N - k] = std::conj(half[k]);
  }
  full[N] = cplx(half[0].real(), 0.0);
  return full;
}

}  // namespace

FrequencyGrid::FrequencyGrid(double u_max, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ParameterError("grid_step", "must be a finite value > 0");
  }
  if (!(u_max > 0.0) || !std::isfinite(u_max)) {
    throw ParameterError("u_max", "must be a finite value > 0");
  }
  const double ratio = u_max / step;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
    throw ParameterError("u_max", "must be a whole multiple of the grid step");
  }
  half_count_ = static_cast<std::size_t>(rounded);
  step_ = step;
}

FrequencyGrid FrequencyGrid::for_models(int m_max, double step) {
  if (m_max < 1) throw ParameterError("m_max", "must be >= 1");
  return FrequencyGrid(std::numbers::pi * m_max, step);
}

std::size_t FrequencyGrid::band_half(int m) const {
  if (m < 0) throw ParameterError("m", "must be >= 0");
  if (m == 0) return 0;
  const double edge = std::numbers::pi * m;
  const double ratio = edge / step_;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 * ratio) {
    throw GridCoverageError("pi*m = " + std::to_string(edge) +
                            " is not on the frequency grid (step " + std::to_string(step_) + ")");
  }
  const auto half = static_cast<std::size_t>(rounded);
  if (half > half_count_) {
    throw GridCoverageError("band [-pi*m, pi*m] for m = " + std::to_string(m) +
                            " exceeds grid u_max = " + std::to_string(u_max()));
  }
  if (half % 2 != 0) {
    throw GridCoverageError("grid step must put an even number of intervals in [0, pi*m]");
  }
  return half;
}

std::vector<cplx> eval_psi_hat(const IncrementSample& sample, const FrequencyGrid& grid) {
  const auto z = sorted_values(sample);
  return mirror(half_sums(z, grid.step(), grid.half_count(), true, false).psi);
}

std::vector<cplx> eval_theta_hat(const IncrementSample& sample, const FrequencyGrid& grid) {
  const auto z = sorted_values(sample);
  return mirror(half_sums(z, grid.step(), grid.half_count(), false, true).theta);
}

std::vector<cplx> truncated_reciprocal(std::span<const cplx> psi_hat, std::size_t n,
                                       double kappa_psi) {
  if (n == 0) throw EmptySampleError();
  if (!(kappa_psi > 0.0)) throw ParameterError("kappa_psi", "must be > 0");
  const double threshold = kappa_psi / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out(psi_hat.size());
  for (std::size_t i = 0; i < psi_hat.size(); ++i) {
    out[i] = std::abs(psi_hat[i]) > threshold ? 1.0 / psi_hat[i] : cplx(0.0, 0.0);
  }
  return out;
}

EcfTable build_ecf_table(const IncrementSample& sample, const FrequencyGrid& grid,
                         double kappa_psi) {
  const auto z = sorted_values(sample);
  auto sums = half_sums(z, grid.step(), grid.half_count(), true, true);
  EcfTable t{grid, mirror(sums.psi), mirror(sums.theta), {}, kappa_psi, z.size(), 0.0};
  t.inv_psi_tilde = truncated_reciprocal(t.psi_hat, t.n, kappa_psi);
  // Reciprocals of conjugates are conjugates of reciprocals only up to
  // rounding, so mirror the positive half to keep the symmetry exact.
  for (std::size_t k = 1; k <= grid.half_count(); ++k) {
    t.inv_psi_tilde[grid.center() - k] = std::conj(t.inv_psi_tilde[grid.center() + k]);
  }
  for (double v : z) t.sum_squares += v * v;
  return t;
}

std::vector<double> phi_hat_all(const EcfTable& table, int m_max) {
  if (m_max < 0) throw ParameterError("m", "must be >= 0");
  const std::size_t max_half = table.grid.band_half(m_max);
  std::vector<double> weight(table.inv_psi_tilde.size());
  for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = std::norm(table.inv_psi_tilde[i]);
  const auto cumulative =
      quad::nested_simpson(weight, table.grid.center(), max_half, table.grid.step());
  std::vector<double> out(m_max + 1);
  for (int m = 0; m <= m_max; ++m) out[m] = cumulative[table.grid.band_half(m) / 2];
  return out;
}

double phi_hat(const EcfTable& table, int m) {
  if (m < 0) throw ParameterError("m", "must be >= 0");
  const std::size_t half = table.grid.band_half(m);
  std::vector<double> weight(table.inv_psi_tilde.size());
  for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = std::norm(table.inv_psi_tilde[i]);
  return quad::simpson_band(weight, table.grid.center(), half, table.grid.step());
}

double suggest_beta_hint(const EcfTable& table, double delta) {
  const double floor = 3.0 * table.kappa_psi / std::sqrt(static_cast<double>(table.n));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k <= table.grid.half_count(); ++k) {
    const std::size_t i = table.grid.center() + k;
    const double u = table.grid.u(i);
    const double a = std::abs(table.psi_hat[i]);
    if (u < 1.0 || a <= floor) continue;
    const double x = 0.5 * std::log1p(u * u);
    const double y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 3) return std::numeric_limits<double>::quiet_NaN();
  const double c = static_cast<double>(count);
  const double denom = c * sxx - sx * sx;
  if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double slope = (c * sxy - sx * sy) / denom;
  return std::max(0.0, -slope / delta);
}

}  // namespace levy
