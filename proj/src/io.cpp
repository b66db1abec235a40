#include "levy/io.hpp"

#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>

#include <json.hpp>

#include "levy/errors.hpp"

namespace levy::io {
namespace {

using nlohmann::json;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line, const char* column) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError(line, std::string("column '") + column + "' is not a finite number: '" +
                               t + "'");
  }
  return v;
}

json model_json(const ModelSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.named_params()) params[k] = v;
  return params;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_increments_csv(const fs::path& path, const IncrementSample& sample) {
  auto out = open_out(path);
  out << "k,z\n";
  for (std::size_t k = 0; k < sample.values.size(); ++k) {
    out << (k + 1) << ',' << format_double(sample.values[k]) << '\n';
  }
  close_checked(out, path);
}

void write_sample_metadata(const fs::path& path, const IncrementSample& sample) {
  json j;
  if (sample.model) {
    j["model"] = std::string(sample.model->name());
    j["params"] = model_json(*sample.model);
  } else {
    j["model"] = nullptr;
    j["params"] = nullptr;
  }
  j["n"] = sample.values.size();
  j["delta"] = sample.delta;
  j["seed"] = sample.seed;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_checked(out, path);
}

std::vector<double> read_increments_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header 'k,z'");
  ++line_no;
  {
    const auto comma = line.find(',');
    if (comma == std::string::npos || trim(line.substr(0, comma)) != "k" ||
        trim(line.substr(comma + 1)) != "z") {
      throw ParseError(1, "expected header 'k,z', got '" + trim(line) + "'");
    }
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(line_no, "expected two comma-separated fields");
    }
    parse_number(line.substr(0, comma), line_no, "k");
    values.push_back(parse_number(line.substr(comma + 1), line_no, "z"));
  }
  if (values.empty()) throw ParseError(line_no, "file holds no increments");
  return values;
}

SampleMetadata read_sample_metadata(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("invalid metadata JSON: ") + e.what());
  }
  SampleMetadata meta;
  try {
    if (j.contains("model") && !j["model"].is_null()) {
      std::map<std::string, double> params;
      for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
      meta.model = ModelSpec::from_named(j["model"].get<std::string>(), params);
    }
    if (j.contains("n")) meta.n = j["n"].get<std::size_t>();
    if (j.contains("delta")) meta.delta = j["delta"].get<double>();
    if (j.contains("seed")) meta.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("invalid metadata field: ") + e.what());
  }
  return meta;
}

void write_ecf_csv(const fs::path& path, const EcfTable& table) {
  auto out = open_out(path);
  out << "u,re_psi,im_psi,re_theta,im_theta,re_invpsi,im_invpsi\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    out << format_double(table.grid.u(i)) << ',' << format_double(table.psi_hat[i].real()) << ','
        << format_double(table.psi_hat[i].imag()) << ','
        << format_double(table.theta_hat[i].real()) << ','
        << format_double(table.theta_hat[i].imag()) << ','
        << format_double(table.inv_psi_tilde[i].real()) << ','
        << format_double(table.inv_psi_tilde[i].imag()) << '\n';
  }
  close_checked(out, path);
}

void write_estimate_csv(const fs::path& path, std::span<const double> x,
                        std::span<const double> g_hat, const std::optional<ModelSpec>& truth) {
  auto out = open_out(path);
  out << (truth ? "x,g_hat,g_true\n" : "x,g_hat\n");
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_double(x[i]) << ',' << format_double(g_hat[i]);
    if (truth) out << ',' << format_double(g_true(*truth, x[i]));
    out << '\n';
  }
  close_checked(out, path);
}

void write_spectral_csv(const fs::path& path, const SpectralEstimate& spectral) {
  auto out = open_out(path);
  out << "u,re_gstar_hat,im_gstar_hat\n";
  for (std::size_t i = 0; i < spectral.values.size(); ++i) {
    out << format_double(spectral.u(i)) << ',' << format_double(spectral.values[i].real())
        << ',' << format_double(spectral.values[i].imag()) << '\n';
  }
  close_checked(out, path);
}

void write_trace_csv(const fs::path& path, const SelectionTrace& trace) {
  auto out = open_out(path);
  out << "m,contrast,penalty,objective,selected\n";
  for (const auto& r : trace.rows) {
    out << r.m << ',' << format_double(r.contrast) << ',' << format_double(r.penalty) << ','
        << format_double(r.objective) << ',' << (r.m == trace.m_hat ? 1 : 0) << '\n';
  }
  close_checked(out, path);
}

void write_calibration_csv(const fs::path& path, const std::vector<CalibrationRow>& rows) {
  auto out = open_out(path);
  out << "kappa_prime,n,mean_mise,mean_oracle_ratio,mean_m_hat\n";
  for (const auto& r : rows) {
    out << format_double(r.kappa_prime) << ',' << r.n << ',' << format_double(r.mean_mise) << ','
        << format_double(r.mean_oracle_ratio) << ',' << format_double(r.mean_m_hat) << '\n';
  }
  close_checked(out, path);
}

CampaignWriter::CampaignWriter(fs::path dir, const ExperimentConfig& config)
    : dir_(std::move(dir)), config_(config) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  x_grid_ = linspace(config.x_min, config.x_max, config.x_points);
  const fs::path mise_path = dir_ / "mise.csv";
  mise_ = open_out(mise_path);
  mise_ << "n,rep,m_hat,mise_selected,mise_oracle\n";
  close_checked(mise_, mise_path);
}

void CampaignWriter::write(const ReplicationResult& r) {
  const std::string tag = std::to_string(r.n) + "_" + std::to_string(r.rep);
  write_trace_csv(dir_ / ("trace_" + tag + ".csv"), r.trace);
  if (!r.g_hat.empty()) {
    write_estimate_csv(dir_ / ("estimate_" + tag + ".csv"), x_grid_, r.g_hat, config_.spec);
  }
  mise_ << r.n << ',' << r.rep << ',' << r.m_hat << ',' << format_double(r.mise_selected) << ','
        << format_double(r.mise_oracle) << '\n';
  close_checked(mise_, dir_ / "mise.csv");
}

void CampaignWriter::finish(const CampaignResult& result, bool with_timestamp) {
  const auto& c = result.config;
  json j;
  j["model"] = std::string(c.spec.name());
  j["params"] = model_json(c.spec);
  j["delta"] = c.delta;
  j["n_values"] = c.n_values;
  j["replications"] = c.replications;
  j["seed"] = c.root_seed;
  j["penalty"] = {{"kappa_prime", c.penalty.kappa_prime}, {"kappa_theo", c.penalty.kappa_theo},
                  {"kappa_psi", c.penalty.kappa_psi},     {"beta_hint", c.penalty.beta_hint},
                  {"epsilon", c.penalty.epsilon},         {"m_max_cap", c.penalty.m_max_cap}};
  j["grid"] = {{"step", c.grid.step}};
  j["grid"]["u_max"] = c.grid.u_max ? json(*c.grid.u_max) : json(nullptr);
  json aggs = json::array();
  for (const auto& a : result.aggregates) {
    aggs.push_back({{"n", a.n},
                    {"mean_mise", a.mean_mise},
                    {"sd_mise", a.sd_mise},
                    {"se_mise", a.se_mise},
                    {"mean_m_hat", a.mean_m_hat},
                    {"mean_oracle_mise", a.mean_oracle_mise},
                    {"mean_oracle_ratio", a.mean_oracle_ratio},
                    {"share_ratio_within_4", a.share_ratio_within_4}});
  }
  j["aggregates"] = aggs;
  if (result.rate) {
    j["rate"] = {{"slope", result.rate->slope}, {"intercept", result.rate->intercept}};
  } else {
    j["rate"] = nullptr;
  }
  if (with_timestamp) j["timestamp"] = utc_timestamp();
  const fs::path path = dir_ / "summary.json";
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_checked(out, path);
}

void export_campaign(const CampaignResult& result, const fs::path& dir, bool with_timestamp) {
  CampaignWriter writer(dir, result.config);
  for (const auto& r : result.replications) writer.write(r);
  writer.finish(result, with_timestamp);
}

}  // namespace levy::io
