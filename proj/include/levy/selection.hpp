#pragma once

#include <cstddef>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/estimator.hpp"
#include "levy/models.hpp"

namespace levy {

struct PenaltyConfig {
  /// Constant of the estimated penalty. Zero is accepted and turns the
  /// criterion into the bare contrast.
  double kappa_prime = 2.0;
  /// Constant of the theoretical penalty (oracle experiments only).
  double kappa_theo = 1.0;
  /// Truncation constant of 1/psi_tilde.
  double kappa_psi = 1.0;
  /// Assumed polynomial decay exponent of |psi_delta|; drives m_n.
  double beta_hint = 0.0;
  /// Slack of the collection-size constraint; must lie in (0, 1).
  double epsilon = 0.5;
  int m_max_cap = 64;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

struct SelectionRow {
  int m = 0;
  double contrast = 0.0;
  double penalty = 0.0;
  double objective = 0.0;
};

struct SelectionTrace {
  std::vector<SelectionRow> rows;
  int m_hat = 1;
  /// Every m whose objective equals the minimum exactly.
  std::vector<int> ties;
};

struct SelectionResult {
  SelectionTrace trace;
  /// Spectral estimate at m_hat.
  SpectralEstimate estimate;
  /// Penalty per m with kappa_prime = 1 (index m - 1).
  std::vector<double> unit_penalty;
  /// Diagnostic decay exponent from the data; never applied automatically.
  double beta_suggestion = 0.0;
};

/// {1, ..., m_n} with m_n = min(cap, floor((n delta)^{1/(2 beta_hint delta + 1)}), n), m_n >= 1.
std::vector<int> build_collection(std::size_t n, double delta, const PenaltyConfig& config);

/// kappa' (1 + sum Z^2 / (n delta^2)) phi_hat(m) / n.
double pen_hat(const IncrementSample& sample, const EcfTable& table, int m,
               const PenaltyConfig& config);

/// Integral of 1/|psi_delta(u)|^2 over [-pi m, pi m] for the true model.
double phi_psi_true(const ModelSpec& spec, double delta, int m);

/// kappa (1 + E[Z^2]/delta) Phi_psi(m) / (n delta).
double pen_theoretical(const ModelSpec& spec, int m, std::size_t n, double delta,
                       const PenaltyConfig& config);

/// Argmin of contrast + penalty over the rows; ties go to the smallest m.
SelectionTrace choose_model(std::vector<SelectionRow> rows);

/// Full adaptive selection on one sample. `grid` must cover pi m_n.
SelectionResult select(const IncrementSample& sample, const PenaltyConfig& config,
                       const FrequencyGrid& grid);

/// Same, reusing an already built table (its kappa_psi must match config).
SelectionResult select(const IncrementSample& sample, const PenaltyConfig& config,
                       const EcfTable& table);

}  // namespace levy
