#include "levy/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "levy/errors.hpp"
#include "levy/estimator.hpp"
#include "levy/quadrature.hpp"
#include "levy/rng.hpp"

namespace levy {

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw ParameterError("n_values", "must not be empty");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 2) throw ParameterError("n_values", "every sample size must be >= 2");
    if (i > 0 && n_values[i] <= n_values[i - 1]) {
      throw ParameterError("n_values", "must be strictly increasing");
    }
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta", "must be > 0");
  if (replications < 1) throw ParameterError("replications", "must be >= 1");
  penalty.validate();
  if (!(grid.step > 0.0)) throw ParameterError("grid_step", "must be > 0");
  if (grid.u_max && !(*grid.u_max > 0.0)) throw ParameterError("u_max", "must be > 0");
  if (x_points < 1) throw ParameterError("x_points", "must be >= 1");
  if (!(x_max >= x_min)) throw ParameterError("x_max", "must be >= x_min");
  // Every band edge must land on the grid.
  for (std::size_t n : n_values) {
    const int m_n = build_collection(n, delta, penalty).back();
    const FrequencyGrid g(grid.u_max.value_or(std::numbers::pi * m_n), grid.step);
    g.band_half(m_n);
  }
}

std::uint64_t replication_seed(std::uint64_t root_seed, std::size_t n, std::size_t rep) {
  return derive_seed(root_seed, StreamPurpose::replication, {n, rep});
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t n_index,
                                  std::size_t rep) {
  ReplicationResult out;
  out.n = config.n_values.at(n_index);
  out.n_index = n_index;
  out.rep = rep;
  out.seed = replication_seed(config.root_seed, out.n, rep);

  const IncrementSample sample = simulate_increments(config.spec, out.n, config.delta, out.seed);
  const int m_n = build_collection(out.n, config.delta, config.penalty).back();
  const FrequencyGrid grid(config.grid.u_max.value_or(std::numbers::pi * m_n), config.grid.step);
  const EcfTable table = build_ecf_table(sample, grid, config.penalty.kappa_psi);
  SelectionResult sel = select(sample, config.penalty, table);

  // Band error against the truth for every m at once; entry-for-entry the
  // same arithmetic as mise_against_truth on the restricted estimate.
  const SpectralEstimate widest = spectral_g_hat(table, m_n, config.delta);
  std::vector<double> err(widest.values.size());
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] = std::norm(widest.values[i] - g_star_true(config.spec, widest.u(i)));
  }
  const auto band = quad::nested_simpson(err, widest.half(), widest.half(), grid.step());
  out.mise_per_m.reserve(m_n);
  for (int m = 1; m <= m_n; ++m) {
    const double b = band[grid.band_half(m) / 2];
    out.mise_per_m.push_back((b + tail_energy(config.spec, m)) / (2.0 * std::numbers::pi));
  }
  out.m_hat = sel.trace.m_hat;
  out.mise_selected = out.mise_per_m[out.m_hat - 1];
  const auto best = std::min_element(out.mise_per_m.begin(), out.mise_per_m.end());
  out.mise_oracle = *best;
  out.m_oracle = static_cast<int>(best - out.mise_per_m.begin()) + 1;
  out.trace = std::move(sel.trace);
  out.unit_penalty = std::move(sel.unit_penalty);

  if (rep < config.dump_estimates) {
    const auto x = linspace(config.x_min, config.x_max, config.x_points);
    out.g_hat = reconstruct(sel.estimate, x);
  }
  return out;
}

CampaignResult run_campaign(const ExperimentConfig& config,
                            const ReplicationObserver& observer) {
  config.validate();
  CampaignResult result;
  result.config = config;
  result.x_grid = linspace(config.x_min, config.x_max, config.x_points);

  struct Job {
    std::size_t n_index;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    for (std::size_t r = 0; r < config.replications; ++r) jobs.push_back({i, r});
  }
  std::vector<std::optional<ReplicationResult>> slots(jobs.size());

  std::atomic<std::size_t> next_job{0};
  std::atomic<bool> failed{false};
  std::mutex emit_mutex;
  std::size_t next_emit = 0;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t j = next_job.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        ReplicationResult r = run_replication(config, jobs[j].n_index, jobs[j].rep);
        std::lock_guard lock(emit_mutex);
        slots[j] = std::move(r);
        while (next_emit < slots.size() && slots[next_emit]) {
          if (observer) observer(*slots[next_emit]);
          ++next_emit;
        }
      } catch (...) {
        std::lock_guard lock(emit_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::size_t threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  result.replications.reserve(slots.size());
  for (auto& s : slots) result.replications.push_back(std::move(*s));
  aggregate(result);
  return result;
}

void aggregate(CampaignResult& result) {
  const auto& cfg = result.config;
  result.aggregates.clear();
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    NAggregate a;
    a.n = cfg.n_values[i];
    std::vector<const ReplicationResult*> reps;
    for (const auto& r : result.replications) {
      if (r.n_index == i) reps.push_back(&r);
    }
    if (reps.empty()) continue;
    const double count = static_cast<double>(reps.size());
    double within = 0.0;
    for (const auto* r : reps) {
      a.mean_mise += r->mise_selected;
      a.mean_m_hat += r->m_hat;
      a.mean_oracle_mise += r->mise_oracle;
      const double ratio = r->mise_selected / r->mise_oracle;
      a.mean_oracle_ratio += ratio;
      if (ratio <= 4.0) within += 1.0;
    }
    a.mean_mise /= count;
    a.mean_m_hat /= count;
    a.mean_oracle_mise /= count;
    a.mean_oracle_ratio /= count;
    a.share_ratio_within_4 = within / count;
    double ss = 0.0;
    for (const auto* r : reps) ss += (r->mise_selected - a.mean_mise) * (r->mise_selected - a.mean_mise);
    a.sd_mise = reps.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    a.se_mise = a.sd_mise / std::sqrt(count);
    result.aggregates.push_back(a);
  }
  result.rate.reset();
  if (result.aggregates.size() >= 3) {
    std::vector<double> nd, means;
    for (const auto& a : result.aggregates) {
      nd.push_back(static_cast<double>(a.n) * cfg.delta);
      means.push_back(a.mean_mise);
    }
    result.rate = fit_rate(nd, means);
  }
}

std::vector<double> oracle_ratio(const CampaignResult& result) {
  std::vector<double> out;
  for (const auto& a : result.aggregates) out.push_back(a.mean_oracle_ratio);
  return out;
}

RateFit fit_rate(const std::vector<double>& n_delta, const std::vector<double>& mise_means) {
  if (n_delta.size() != mise_means.size()) {
    throw ParameterError("mise_means", "must match the number of sample sizes");
  }
  if (n_delta.size() < 3) throw ParameterError("n_values", "a rate fit needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  std::vector<double> x(n_delta.size()), y(n_delta.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(n_delta[i] > 0.0)) throw ParameterError("n_values", "must be positive");
    if (!(mise_means[i] > 0.0)) throw ParameterError("mise_means", "must be positive");
    x[i] = std::log(n_delta[i]);
    y[i] = std::log(mise_means[i]);
    sx += x[i];
    sy += y[i];
  }
  const double c = static_cast<double>(x.size());
  const double mx = sx / c, my = sy / c;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ParameterError("n_values", "need at least two distinct sample sizes");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::vector<CalibrationRow> calibrate(const CampaignResult& result,
                                      const std::vector<double>& kappas) {
  std::vector<CalibrationRow> out;
  for (double kappa : kappas) {
    if (!(kappa >= 0.0)) throw ParameterError("kappa_sweep", "values must be >= 0");
    for (std::size_t i = 0; i < result.config.n_values.size(); ++i) {
      CalibrationRow row;
      row.kappa_prime = kappa;
      row.n = result.config.n_values[i];
      double count = 0.0;
      for (const auto& r : result.replications) {
        if (r.n_index != i) continue;
        std::vector<SelectionRow> rows = r.trace.rows;
        for (std::size_t k = 0; k < rows.size(); ++k) {
          rows[k].penalty = kappa * r.unit_penalty[k];
          rows[k].objective = rows[k].contrast + rows[k].penalty;
        }
        const int m_hat = choose_model(std::move(rows)).m_hat;
        const double mise = r.mise_per_m[m_hat - 1];
        row.mean_mise += mise;
        row.mean_oracle_ratio += mise / r.mise_oracle;
        row.mean_m_hat += m_hat;
        count += 1.0;
      }
      if (count > 0.0) {
        row.mean_mise /= count;
        row.mean_oracle_ratio /= count;
        row.mean_m_hat /= count;
      }
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace levy
