#include "levy/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "levy/ecf.hpp"
#include "levy/errors.hpp"
#include "levy/estimator.hpp"
#include "levy/experiments.hpp"
#include "levy/io.hpp"
#include "levy/models.hpp"
#include "levy/selection.hpp"

namespace levy::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Merged view of the config file and command-line overrides, with typed,
// field-named access.
class Settings {
 public:
  explicit Settings(json doc) : doc_(std::move(doc)) {
    if (!doc_.is_object()) throw ParameterError("config", "must be a JSON object");
    const auto& allowed = config_keys();
    std::vector<std::string> unknown;
    for (const auto& [key, value] : doc_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) unknown.push_back(key);
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
      throw ParameterError("config", "unknown keys: " + list);
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key) && !doc_[key].is_null(); }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return as_real(doc_[key], key);
  }

  double real_required(const std::string& key) const {
    if (!has(key)) throw ParameterError(key, "is required");
    return as_real(doc_[key], key);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    return as_integer(doc_[key], key);
  }

  std::int64_t integer_required(const std::string& key) const {
    if (!has(key)) throw ParameterError(key, "is required");
    return as_integer(doc_[key], key);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_[key];
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const auto i = as_integer(v, key);
    if (i < 0) throw ParameterError(key, "must be >= 0");
    return static_cast<std::uint64_t>(i);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_string()) throw ParameterError(key, "expected a string");
    return doc_[key].get<std::string>();
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_array()) throw ParameterError(key, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& v : doc_[key]) out.push_back(as_real(v, key));
    return out;
  }

  std::vector<std::size_t> sizes(const std::string& key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_array()) throw ParameterError(key, "expected a list of integers");
    std::vector<std::size_t> out;
    for (const auto& v : doc_[key]) {
      const auto i = as_integer(v, key);
      if (i < 1) throw ParameterError(key, "values must be >= 1");
      out.push_back(static_cast<std::size_t>(i));
    }
    return out;
  }

  std::optional<ModelSpec> model() const {
    if (!has("model")) return std::nullopt;
    const auto& m = doc_["model"];
    if (!m.is_object()) throw ParameterError("model", "expected an object with a 'kind' key");
    if (!m.contains("kind") || !m["kind"].is_string()) {
      throw ParameterError("model.kind", "is required");
    }
    std::map<std::string, double> params;
    for (const auto& [k, v] : m.items()) {
      if (k == "kind") continue;
      params[k] = as_real(v, "model." + k);
    }
    return ModelSpec::from_named(m["kind"].get<std::string>(), params);
  }

 private:
  static double as_real(const json& v, const std::string& key) {
    if (!v.is_number()) throw ParameterError(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParameterError(key, "must be finite");
    return d;
  }

  static std::int64_t as_integer(const json& v, const std::string& key) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ParameterError(key, "expected an integer");
  }

  json doc_;
};

PenaltyConfig penalty_from(const Settings& s) {
  PenaltyConfig p;
  p.kappa_prime = s.real("kappa_prime", p.kappa_prime);
  p.kappa_theo = s.real("kappa_theo", p.kappa_theo);
  p.kappa_psi = s.real("kappa_psi", p.kappa_psi);
  p.beta_hint = s.real("beta_hint", p.beta_hint);
  p.epsilon = s.real("epsilon", p.epsilon);
  const auto cap = s.integer("m_max_cap", p.m_max_cap);
  if (cap < 1 || cap > 100000) throw ParameterError("m_max_cap", "must lie in 1..100000");
  p.m_max_cap = static_cast<int>(cap);
  p.validate();
  return p;
}

std::vector<double> x_grid_from(const Settings& s) {
  const double lo = s.real("x_min", -5.0);
  const double hi = s.real("x_max", 5.0);
  const auto count = s.integer("x_points", 201);
  if (count < 1) throw ParameterError("x_points", "must be >= 1");
  if (!(hi >= lo)) throw ParameterError("x_max", "must be >= x_min");
  return linspace(lo, hi, static_cast<std::size_t>(count));
}

double grid_step_from(const Settings& s) {
  const double step = s.real("grid_step", kDefaultGridStep);
  if (!(step > 0.0)) throw ParameterError("grid_step", "must be > 0");
  return step;
}

struct LoadedSample {
  IncrementSample sample;
  std::optional<ModelSpec> model;
};

LoadedSample load_sample(const Settings& s) {
  const fs::path input = s.text("input", "");
  if (input.empty()) throw ParameterError("input", "is required");
  if (!fs::exists(input)) throw IoError("input file " + input.string() + " does not exist");
  LoadedSample out;
  out.sample.values = io::read_increments_csv(input);
  std::optional<double> delta;
  const fs::path meta_path = io::sidecar_path(input);
  if (fs::exists(meta_path)) {
    const auto meta = io::read_sample_metadata(meta_path);
    delta = meta.delta;
    out.model = meta.model;
    if (meta.seed) out.sample.seed = *meta.seed;
  }
  if (s.has("delta")) delta = s.real("delta", 1.0);
  if (!delta) throw ParameterError("delta", "is required (no sidecar metadata found)");
  if (!(*delta > 0.0)) throw ParameterError("delta", "must be > 0");
  out.sample.delta = *delta;
  if (auto m = s.model()) out.model = m;
  out.sample.model = out.model;
  return out;
}

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

int cmd_simulate(const Settings& s, std::ostream& out) {
  const auto model = s.model();
  if (!model) throw ParameterError("model", "is required");
  const auto n = s.integer_required("n");
  if (n < 1) throw ParameterError("n", "must be >= 1");
  const double delta = s.real("delta", 1.0);
  if (!(delta > 0.0)) throw ParameterError("delta", "must be > 0");
  const auto seed = s.seed("seed", 0);
  const fs::path path = s.text("out", "increments.csv");

  const auto sample = simulate_increments(*model, static_cast<std::size_t>(n), delta, seed);
  if (path.has_parent_path()) prepare_dir(path.parent_path());
  io::write_increments_csv(path, sample);
  io::write_sample_metadata(io::sidecar_path(path), sample);
  out << "model=" << model->name() << " n=" << n << " delta=" << io::format_double(delta)
      << " seed=" << seed << " -> " << path.string() << '\n';
  return kOk;
}

int cmd_estimate(const Settings& s, std::ostream& out) {
  auto loaded = load_sample(s);
  const auto m = s.integer_required("m");
  if (m < 1 || m > 100000) throw ParameterError("m", "must lie in 1..100000");
  const double kappa_psi = s.real("kappa_psi", 1.0);
  if (!(kappa_psi > 0.0)) throw ParameterError("kappa_psi", "must be > 0");
  const double step = grid_step_from(s);
  const double u_max = s.real("u_max", std::numbers::pi * static_cast<double>(m));
  const auto x = x_grid_from(s);
  const FrequencyGrid grid(u_max, step);
  grid.band_half(static_cast<int>(m));

  const auto table = build_ecf_table(loaded.sample, grid, kappa_psi);
  const auto spectral = spectral_g_hat(table, static_cast<int>(m), loaded.sample.delta);
  const auto g_hat = reconstruct(spectral, x);

  const fs::path dir = prepare_dir(s.text("out_dir", "."));
  io::write_estimate_csv(dir / "estimate.csv", x, g_hat, loaded.model);
  io::write_spectral_csv(dir / "spectral.csv", spectral);
  io::write_ecf_csv(dir / "ecf.csv", table);
  out << "m=" << m << " contrast=" << io::format_double(contrast(spectral))
      << " norm=" << io::format_double(empirical_norm(spectral));
  if (loaded.model) {
    out << " mise=" << io::format_double(mise_against_truth(spectral, *loaded.model));
  }
  out << '\n';
  return kOk;
}

int cmd_select(const Settings& s, std::ostream& out) {
  auto loaded = load_sample(s);
  const auto penalty = penalty_from(s);
  const double step = grid_step_from(s);
  const auto x = x_grid_from(s);
  const auto collection = build_collection(loaded.sample.size(), loaded.sample.delta, penalty);
  const int m_n = collection.back();
  const double u_max = s.real("u_max", std::numbers::pi * m_n);
  const FrequencyGrid grid(u_max, step);
  grid.band_half(m_n);

  const auto result = select(loaded.sample, penalty, grid);
  const auto g_hat = reconstruct(result.estimate, x);

  const fs::path dir = prepare_dir(s.text("out_dir", "."));
  io::write_trace_csv(dir / "trace.csv", result.trace);
  io::write_estimate_csv(dir / "estimate.csv", x, g_hat, loaded.model);
  io::write_spectral_csv(dir / "spectral.csv", result.estimate);

  const auto& best = result.trace.rows[result.trace.m_hat - 1];
  out << "m_hat=" << result.trace.m_hat << " objective=" << io::format_double(best.objective)
      << " m_n=" << m_n;
  if (std::isfinite(result.beta_suggestion)) {
    out << " beta_suggestion=" << io::format_double(result.beta_suggestion);
  }
  out << '\n';
  return kOk;
}

ExperimentConfig experiment_from(const Settings& s) {
  ExperimentConfig c;
  if (auto m = s.model()) c.spec = *m;
  c.n_values = s.sizes("n_values", c.n_values);
  c.delta = s.real("delta", c.delta);
  const auto reps = s.integer("replications", static_cast<std::int64_t>(c.replications));
  if (reps < 1) throw ParameterError("replications", "must be >= 1");
  c.replications = static_cast<std::size_t>(reps);
  c.penalty = penalty_from(s);
  c.grid.step = grid_step_from(s);
  if (s.has("u_max")) c.grid.u_max = s.real("u_max", 0.0);
  c.root_seed = s.seed("seed", c.root_seed);
  c.output_dir = s.text("out_dir", c.output_dir.string());
  const auto dumps = s.integer("dump_estimates", 0);
  if (dumps < 0) throw ParameterError("dump_estimates", "must be >= 0");
  c.dump_estimates = static_cast<std::size_t>(dumps);
  c.x_min = s.real("x_min", c.x_min);
  c.x_max = s.real("x_max", c.x_max);
  const auto xp = s.integer("x_points", static_cast<std::int64_t>(c.x_points));
  if (xp < 1) throw ParameterError("x_points", "must be >= 1");
  c.x_points = static_cast<std::size_t>(xp);
  const auto threads = s.integer("threads", 1);
  if (threads < 0) throw ParameterError("threads", "must be >= 0");
  c.threads = static_cast<std::size_t>(threads);
  c.validate();
  return c;
}

void print_aggregates(const CampaignResult& result, std::ostream& out) {
  out << std::left << std::setw(9) << "n" << std::setw(14) << "mean_mise" << std::setw(14)
      << "sd_mise" << std::setw(11) << "mean_m_hat" << "oracle_ratio\n";
  for (const auto& a : result.aggregates) {
    out << std::left << std::setw(9) << a.n << std::setw(14) << std::setprecision(6) << a.mean_mise
        << std::setw(14) << a.sd_mise << std::setw(11) << a.mean_m_hat << a.mean_oracle_ratio
        << '\n';
  }
  if (result.rate) {
    out << "rate slope=" << std::setprecision(6) << result.rate->slope
        << " intercept=" << result.rate->intercept << '\n';
  }
}

int cmd_campaign(const Settings& s, std::ostream& out) {
  const auto config = experiment_from(s);
  io::CampaignWriter writer(config.output_dir, config);
  const auto result =
      run_campaign(config, [&writer](const ReplicationResult& r) { writer.write(r); });
  writer.finish(result);
  print_aggregates(result, out);
  return kOk;
}

int cmd_calibrate(const Settings& s, std::ostream& out) {
  const auto config = experiment_from(s);
  const auto kappas = s.reals("kappa_sweep", {0.5, 1.0, 2.0, 4.0, 8.0});
  if (kappas.empty()) throw ParameterError("kappa_sweep", "must not be empty");
  for (double k : kappas) {
    if (!(k >= 0.0)) throw ParameterError("kappa_sweep", "values must be >= 0");
  }
  const auto result = run_campaign(config);
  const auto rows = calibrate(result, kappas);
  const fs::path dir = prepare_dir(config.output_dir);
  io::write_calibration_csv(dir / "calibration.csv", rows);
  out << std::left << std::setw(13) << "kappa_prime" << std::setw(9) << "n" << std::setw(14)
      << "mean_mise" << std::setw(14) << "oracle_ratio" << "mean_m_hat\n";
  for (const auto& r : rows) {
    out << std::left << std::setprecision(6) << std::setw(13) << r.kappa_prime << std::setw(9)
        << r.n << std::setw(14) << r.mean_mise << std::setw(14) << r.mean_oracle_ratio
        << r.mean_m_hat << '\n';
  }
  return kOk;
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("config", std::string("not valid JSON: ") + e.what());
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model",     "n",         "delta",       "seed",       "out",         "input",
      "out_dir",   "m",         "kappa_prime", "kappa_theo", "kappa_psi",   "beta_hint",
      "epsilon",   "m_max_cap", "grid_step",   "u_max",      "x_min",       "x_max",
      "x_points",  "n_values",  "replications", "threads",   "dump_estimates", "kappa_sweep"};
  return keys;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric Levy density estimation from sampled increments", "levy-est"};
  app.require_subcommand(1);

  json overrides = json::object();
  std::string config_path;

  auto real = [&overrides](CLI::App* sub, const std::string& flag, const std::string& key,
                           const std::string& help) {
    sub->add_option_function<double>(
        flag, [&overrides, key](const double& v) { overrides[key] = v; }, help);
  };
  auto integer = [&overrides](CLI::App* sub, const std::string& flag, const std::string& key,
                              const std::string& help) {
    sub->add_option_function<std::int64_t>(
        flag, [&overrides, key](const std::int64_t& v) { overrides[key] = v; }, help);
  };
  auto text = [&overrides](CLI::App* sub, const std::string& flag, const std::string& key,
                           const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  auto model_flags = [&overrides](CLI::App* sub) {
    sub->add_option_function<std::string>(
        "--model", [&overrides](const std::string& v) { overrides["model"]["kind"] = v; },
        "levy-gamma | bilateral-gamma | variance-gamma | compound-poisson-gaussian | "
        "compound-poisson-exponential");
    for (const char* p : {"alpha", "beta", "alpha2", "beta2", "c", "mu", "sigma", "lambda"}) {
      const std::string key = p;
      sub->add_option_function<double>(
          "--" + key, [&overrides, key](const double& v) { overrides["model"][key] = v; },
          "model parameter " + key);
    }
  };
  auto penalty_flags = [&](CLI::App* sub) {
    real(sub, "--kappa-prime", "kappa_prime", "estimated-penalty constant (default 2)");
    real(sub, "--kappa-theo", "kappa_theo", "theoretical-penalty constant (default 1)");
    real(sub, "--kappa-psi", "kappa_psi", "truncation constant (default 1)");
    real(sub, "--beta-hint", "beta_hint", "decay exponent used for m_n (default 0)");
    real(sub, "--epsilon", "epsilon", "collection slack in (0,1) (default 0.5)");
    integer(sub, "--m-max-cap", "m_max_cap", "hard cap on m_n (default 64)");
  };
  auto grid_flags = [&](CLI::App* sub) {
    real(sub, "--grid-step", "grid_step", "frequency grid step (default pi/64)");
    real(sub, "--u-max", "u_max", "frequency grid half-width (default pi*m)");
  };
  auto x_flags = [&](CLI::App* sub) {
    real(sub, "--x-min", "x_min", "spatial grid start (default -5)");
    real(sub, "--x-max", "x_max", "spatial grid end (default 5)");
    integer(sub, "--x-points", "x_points", "spatial grid size (default 201)");
  };
  auto experiment_flags = [&](CLI::App* sub) {
    model_flags(sub);
    sub->add_option_function<std::vector<std::int64_t>>(
           "--n-values",
           [&overrides](const std::vector<std::int64_t>& v) { overrides["n_values"] = v; },
           "sample sizes, comma separated")
        ->delimiter(',');
    integer(sub, "--replications", "replications", "replications per n");
    real(sub, "--delta", "delta", "sampling interval");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&overrides](const std::uint64_t& v) { overrides["seed"] = v; }, "root seed");
    penalty_flags(sub);
    grid_flags(sub);
    x_flags(sub);
    integer(sub, "--dump-estimates", "dump_estimates", "replications per n to keep estimates of");
    integer(sub, "--threads", "threads", "worker threads (0 = all cores)");
    text(sub, "--out-dir", "out_dir", "output directory");
  };

  auto* sim = app.add_subcommand("simulate", "simulate increments of a catalogued model");
  auto* est = app.add_subcommand("estimate", "projection estimate at a fixed m");
  auto* sel = app.add_subcommand("select", "adaptive choice of m and the selected estimate");
  auto* camp = app.add_subcommand("campaign", "Monte Carlo risk campaign");
  auto* cal = app.add_subcommand("calibrate", "sweep of the penalty constant");
  for (auto* sub : {sim, est, sel, camp, cal}) {
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
  }

  model_flags(sim);
  integer(sim, "--n", "n", "number of increments");
  real(sim, "--delta", "delta", "sampling interval (default 1)");
  sim->add_option_function<std::uint64_t>(
      "--seed", [&overrides](const std::uint64_t& v) { overrides["seed"] = v; }, "seed");
  text(sim, "--out", "out", "increments CSV path (default increments.csv)");

  for (auto* sub : {est, sel}) {
    text(sub, "--input", "input", "increments CSV");
    real(sub, "--delta", "delta", "sampling interval (default: sidecar metadata)");
    model_flags(sub);
    grid_flags(sub);
    x_flags(sub);
    text(sub, "--out-dir", "out_dir", "output directory (default .)");
  }
  integer(est, "--m", "m", "model index");
  real(est, "--kappa-psi", "kappa_psi", "truncation constant (default 1)");
  penalty_flags(sel);

  experiment_flags(camp);
  experiment_flags(cal);
  cal->add_option_function<std::vector<double>>(
         "--kappa-sweep",
         [&overrides](const std::vector<double>& v) { overrides["kappa_sweep"] = v; },
         "penalty constants, comma separated (default 0.5,1,2,4,8)")
      ->delimiter(',');

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }

  try {
    json doc = load_config_file(config_path);
    doc.merge_patch(overrides);
    const Settings settings(doc);
    if (sim->parsed()) return cmd_simulate(settings, out);
    if (est->parsed()) return cmd_estimate(settings, out);
    if (sel->parsed()) return cmd_select(settings, out);
    if (camp->parsed()) return cmd_campaign(settings, out);
    return cmd_calibrate(settings, out);
  } catch (const GridCoverageError& e) {
    err << "error: grid coverage: " << e.what() << '\n';
    return kGridCoverage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}

}  // namespace levy::cli
