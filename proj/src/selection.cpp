#include "levy/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {

void PenaltyConfig::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(field, "must be a finite value > 0");
  };
  if (!(kappa_prime >= 0.0) || !std::isfinite(kappa_prime)) {
    throw ParameterError("kappa_prime", "must be a finite value >= 0");
  }
  positive(kappa_theo, "kappa_theo");
  positive(kappa_psi, "kappa_psi");
  if (!(beta_hint >= 0.0) || !std::isfinite(beta_hint)) {
    throw ParameterError("beta_hint", "must be a finite value >= 0");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon", "must lie in (0, 1)");
  if (m_max_cap < 1) throw ParameterError("m_max_cap", "must be >= 1");
}

std::vector<int> build_collection(std::size_t n, double delta, const PenaltyConfig& config) {
  config.validate();
  if (n < 2) throw ParameterError("n", "the model collection needs n >= 2");
  if (!(delta > 0.0)) throw ParameterError("delta", "must be > 0");
  const double exponent = 1.0 / (2.0 * config.beta_hint * delta + 1.0);
  const double bound = std::pow(static_cast<double>(n) * delta, exponent);
  // The nudge keeps exact powers such as 64^{1/3} from flooring to 3.
  const double rate_cap = std::floor(bound * (1.0 + 1e-12));
  double m_n = std::min({static_cast<double>(config.m_max_cap), rate_cap,
                         static_cast<double>(n)});
  m_n = std::max(1.0, m_n);
  std::vector<int> out(static_cast<std::size_t>(m_n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i) + 1;
  return out;
}

namespace {

double unit_penalty(const EcfTable& table, double delta, double phi) {
  const double n = static_cast<double>(table.n);
  return (1.0 + table.sum_squares / (n * delta * delta)) * phi / n;
}

}  // namespace

double pen_hat(const IncrementSample& sample, const EcfTable& table, int m,
               const PenaltyConfig& config) {
  config.validate();
  validate_sample(sample);
  return config.kappa_prime * unit_penalty(table, sample.delta, phi_hat(table, m));
}

double phi_psi_true(const ModelSpec& spec, double delta, int m) {
  if (m < 0) throw ParameterError("m", "must be >= 0");
  if (m == 0) return 0.0;
  const double edge = std::numbers::pi * m;
  if (const auto* p = std::get_if<LevyGamma>(&spec.params())) {
    const double power = p->beta * delta;
    if (power == std::round(power) && power <= 64.0) {
      // 1/|psi|^2 = (1 + u^2/alpha^2)^power, expanded binomially.
      const int q = static_cast<int>(power);
      double total = 0.0, binom = 1.0;
      for (int k = 0; k <= q; ++k) {
        total += binom * 2.0 * std::pow(edge, 2 * k + 1) /
                 ((2.0 * k + 1.0) * std::pow(p->alpha, 2 * k));
        binom = binom * (q - k) / (k + 1.0);
      }
      return total;
    }
  }
  auto weight = [&](double u) { return 1.0 / std::norm(psi_true(spec, delta, u)); };
  const double scale = weight(edge) * edge;
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    total += quad::adaptive_simpson(weight, std::numbers::pi * k, std::numbers::pi * (k + 1),
                                    1e-13 * std::max(1.0, scale));
  }
  return 2.0 * total;
}

double pen_theoretical(const ModelSpec& spec, int m, std::size_t n, double delta,
                       const PenaltyConfig& config) {
  config.validate();
  if (n == 0) throw EmptySampleError();
  const double second = moments(spec, 2, delta).second_moment_z;
  return config.kappa_theo * (1.0 + second / delta) * phi_psi_true(spec, delta, m) /
         (static_cast<double>(n) * delta);
}

SelectionTrace choose_model(std::vector<SelectionRow> rows) {
  if (rows.empty()) throw ParameterError("collection", "is empty");
  SelectionTrace trace;
  double best = rows.front().objective;
  int best_m = rows.front().m;
  for (const auto& r : rows) {
    if (r.objective < best) {
      best = r.objective;
      best_m = r.m;
    }
  }
  for (const auto& r : rows) {
    if (r.objective == best) trace.ties.push_back(r.m);
  }
  trace.m_hat = best_m;
  trace.rows = std::move(rows);
  return trace;
}

SelectionResult select(const IncrementSample& sample, const PenaltyConfig& config,
                       const FrequencyGrid& grid) {
  config.validate();
  validate_sample(sample);
  const auto collection = build_collection(sample.size(), sample.delta, config);
  grid.band_half(collection.back());  // fail before the expensive part
  const EcfTable table = build_ecf_table(sample, grid, config.kappa_psi);
  return select(sample, config, table);
}

SelectionResult select(const IncrementSample& sample, const PenaltyConfig& config,
                       const EcfTable& table) {
  config.validate();
  validate_sample(sample);
  if (table.kappa_psi != config.kappa_psi) {
    throw ParameterError("kappa_psi", "table was built with a different truncation constant");
  }
  const auto collection = build_collection(sample.size(), sample.delta, config);
  const int m_n = collection.back();
  const FrequencyGrid& grid = table.grid;
  const std::size_t max_half = grid.band_half(m_n);

  const SpectralEstimate widest = spectral_g_hat(table, m_n, sample.delta);
  std::vector<double> energy(widest.values.size());
  for (std::size_t i = 0; i < energy.size(); ++i) energy[i] = std::norm(widest.values[i]);
  const auto norms = quad::nested_simpson(energy, widest.half(), max_half, grid.step());
  const auto phis = phi_hat_all(table, m_n);

  SelectionResult result;
  std::vector<SelectionRow> rows;
  rows.reserve(collection.size());
  for (int m : collection) {
    const double contrast_m = -(norms[grid.band_half(m) / 2] / (2.0 * std::numbers::pi));
    const double unit = unit_penalty(table, sample.delta, phis[m]);
    const double penalty = config.kappa_prime * unit;
    rows.push_back({m, contrast_m, penalty, contrast_m + penalty});
    result.unit_penalty.push_back(unit);
  }
  result.trace = choose_model(std::move(rows));
  result.estimate = spectral_g_hat(table, result.trace.m_hat, sample.delta);
  result.beta_suggestion = suggest_beta_hint(table, sample.delta);
  return result;
}

}  // namespace levy
