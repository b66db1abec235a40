#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/models.hpp"
#include "levy/selection.hpp"

namespace levy {

struct GridParams {
  double step = kDefaultGridStep;
  /// Defaults to pi * m_n when unset.
  std::optional<double> u_max;
};

struct ExperimentConfig {
  ModelSpec spec = ModelSpec::levy_gamma(1.0, 1.0);
  std::vector<std::size_t> n_values{500, 2000, 8000};
  double delta = 1.0;
  std::size_t replications = 50;
  PenaltyConfig penalty{};
  GridParams grid{};
  std::uint64_t root_seed = 20240607;
  std::filesystem::path output_dir = "campaign";
  /// Replications per n whose spatial estimate is kept and exported.
  std::size_t dump_estimates = 0;
  double x_min = -5.0;
  double x_max = 5.0;
  std::size_t x_points = 201;
  /// Worker threads; 0 means hardware concurrency. Outputs do not depend on it.
  std::size_t threads = 1;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

struct ReplicationResult {
  std::size_t n = 0;
  std::size_t n_index = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  int m_hat = 1;
  double mise_selected = 0.0;
  /// mise_per_m[m - 1] for every m in the collection.
  std::vector<double> mise_per_m;
  double mise_oracle = 0.0;
  int m_oracle = 1;
  SelectionTrace trace;
  /// contrast per m and penalty per m at kappa' = 1, for re-selection.
  std::vector<double> unit_penalty;
  /// Present for the first `dump_estimates` replications of each n.
  std::vector<double> g_hat;
};

struct NAggregate {
  std::size_t n = 0;
  double mean_mise = 0.0;
  double sd_mise = 0.0;
  double se_mise = 0.0;
  double mean_m_hat = 0.0;
  double mean_oracle_mise = 0.0;
  double mean_oracle_ratio = 0.0;
  /// Share of replications whose oracle ratio is at most 4.
  double share_ratio_within_4 = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct CampaignResult {
  ExperimentConfig config;
  /// Ordered by (n index, replication).
  std::vector<ReplicationResult> replications;
  std::vector<NAggregate> aggregates;
  /// Present when at least three sample sizes were run.
  std::optional<RateFit> rate;
  std::vector<double> x_grid;
};

using ReplicationObserver = std::function<void(const ReplicationResult&)>;

/// Seed of replication `rep` at sample size `n`; a pure function of its inputs.
std::uint64_t replication_seed(std::uint64_t root_seed, std::size_t n, std::size_t rep);

/// One replication: simulate, select, and score every m against the truth.
ReplicationResult run_replication(const ExperimentConfig& config, std::size_t n_index,
                                  std::size_t rep);

/// Runs every (n, replication) pair. `observer`, if set, receives each result
/// in (n, replication) order as soon as it and all earlier ones are done.
CampaignResult run_campaign(const ExperimentConfig& config,
                            const ReplicationObserver& observer = {});

/// Recomputes aggregates and the rate fit from the replication list.
void aggregate(CampaignResult& result);

/// Mean over replications of MISE(selected) / MISE(oracle), per n.
std::vector<double> oracle_ratio(const CampaignResult& result);

/// Least-squares slope and intercept of log(mise) against log(n delta).
RateFit fit_rate(const std::vector<double>& n_delta, const std::vector<double>& mise_means);

struct CalibrationRow {
  double kappa_prime = 0.0;
  std::size_t n = 0;
  double mean_mise = 0.0;
  double mean_oracle_ratio = 0.0;
  double mean_m_hat = 0.0;
};

/// Re-selects every replication of `result` under each kappa' (same seeds,
/// same samples) and tabulates risk and oracle ratio.
std::vector<CalibrationRow> calibrate(const CampaignResult& result,
                                      const std::vector<double>& kappas);

}  // namespace levy
