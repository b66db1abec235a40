#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/estimator.hpp"
#include "levy/experiments.hpp"
#include "levy/models.hpp"
#include "levy/selection.hpp"

namespace levy::io {

namespace fs = std::filesystem;

/// Shortest-safe text form: 17 significant digits.
std::string format_double(double v);

/// Sidecar path of an increments file: same stem, ".json" extension.
fs::path sidecar_path(const fs::path& csv_path);

/// `k,z` with k = 1..n.
void write_increments_csv(const fs::path& path, const IncrementSample& sample);
/// `{model, params, n, delta, seed}`; model and params are null without provenance.
void write_sample_metadata(const fs::path& path, const IncrementSample& sample);

/// Reads a `k,z` file. Throws ParseError with the offending line number.
std::vector<double> read_increments_csv(const fs::path& path);

struct SampleMetadata {
  std::optional<ModelSpec> model;
  std::optional<std::size_t> n;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
};
SampleMetadata read_sample_metadata(const fs::path& path);

/// `u,re_psi,im_psi,re_theta,im_theta,re_invpsi,im_invpsi`.
void write_ecf_csv(const fs::path& path, const EcfTable& table);
/// `x,g_hat[,g_true]`.
void write_estimate_csv(const fs::path& path, std::span<const double> x,
                        std::span<const double> g_hat, const std::optional<ModelSpec>& truth);
/// `u,re_gstar_hat,im_gstar_hat`.
void write_spectral_csv(const fs::path& path, const SpectralEstimate& spectral);
/// `m,contrast,penalty,objective,selected`.
void write_trace_csv(const fs::path& path, const SelectionTrace& trace);
/// `kappa_prime,n,mean_mise,mean_oracle_ratio,mean_m_hat`.
void write_calibration_csv(const fs::path& path, const std::vector<CalibrationRow>& rows);

/// Streams campaign files into a directory as replications complete, so an
/// interrupted run leaves complete per-replication files behind.
class CampaignWriter {
 public:
  CampaignWriter(fs::path dir, const ExperimentConfig& config);

  /// trace_<n>_<rep>.csv, estimate_<n>_<rep>.csv (when kept), one mise.csv row.
  void write(const ReplicationResult& r);
  /// summary.json.
  void finish(const CampaignResult& result, bool with_timestamp = true);

 private:
  fs::path dir_;
  ExperimentConfig config_;
  std::vector<double> x_grid_;
  std::ofstream mise_;
};

/// Writes every campaign file at once.
void export_campaign(const CampaignResult& result, const fs::path& dir,
                     bool with_timestamp = true);

}  // namespace levy::io
