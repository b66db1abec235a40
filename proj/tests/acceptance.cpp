// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/estimator.hpp"
#include "levy/experiments.hpp"
#include "levy/io.hpp"
#include "levy/models.hpp"
#include "levy/selection.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using levy::ModelSpec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<ModelSpec> catalogue() {
  return {ModelSpec::compound_poisson_gaussian(2.0, 0.5, 1.0),
          ModelSpec::compound_poisson_exponential(1.0, 1.0),
          ModelSpec::levy_gamma(1.0, 1.0),
          ModelSpec::bilateral_gamma(1.0, 1.0, 1.5, 2.0),
          ModelSpec::variance_gamma(1.0, 1.0)};
}

levy::ExperimentConfig gamma_campaign(std::vector<std::size_t> n_values, std::size_t reps) {
  levy::ExperimentConfig c;
  c.spec = ModelSpec::levy_gamma(1.0, 1.0);
  c.n_values = std::move(n_values);
  c.replications = reps;
  c.penalty.kappa_prime = 2.0;
  c.penalty.beta_hint = 1.0;
  c.threads = 0;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double sum_squares(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace

int main() {
  criterion(1, "analytic oracles", 10.0, [] {
    double worst = 0.0, psi0 = 0.0, herm = 0.0;
    for (const auto& spec : catalogue()) {
      for (int k = -40; k <= 40; ++k) {
        const double u = 0.5 * k;
        worst = std::max(worst, std::abs(oracle::fourier_of_g(spec, u) - levy::g_star_true(spec, u)));
      }
      for (double delta : {0.3, 1.0, 2.5}) {
        psi0 = std::max(psi0, std::abs(levy::psi_true(spec, delta, 0.0) - levy::cplx(1.0)));
        for (double u = -20.0; u <= 20.0; u += 0.37) {
          herm = std::max(herm, std::abs(levy::psi_true(spec, delta, -u) -
                                         std::conj(levy::psi_true(spec, delta, u))));
        }
      }
    }
    return Outcome{worst < 1e-6 && psi0 == 0.0 && herm == 0.0,
                   fmt("sup|g* - quadrature| = %.3g", worst) + fmt(", |psi(0)-1| = %.3g", psi0) +
                       fmt(", Hermitian defect = %.3g", herm)};
  });

  criterion(2, "empirical characteristic function", 30.0, [] {
    const std::size_t n = 100000;
    const auto spec = ModelSpec::levy_gamma(1.0, 1.0);
    const auto s = levy::simulate_increments(spec, n, 1.0, 20240607);
    const levy::FrequencyGrid grid(10.0, 10.0 / 640.0);
    const auto psi = levy::eval_psi_hat(s, grid);
    const auto theta = levy::eval_theta_hat(s, grid);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sup = std::max(sup, std::abs(psi[i] - levy::psi_true(spec, 1.0, grid.u(i))));
    }
    const double t0 = std::abs(theta[grid.center()] - levy::cplx(1.0));
    const double bound = 5.0 / std::sqrt(static_cast<double>(n));
    return Outcome{sup <= bound && t0 <= 0.05,
                   fmt("sup|psi_hat - psi| = %.3g", sup) + fmt(" (bound %.3g)", bound) +
                       fmt(", |theta_hat(0) - 1| = %.3g", t0)};
  });

  criterion(3, "Parseval and contrast identity", 10.0, [] {
    double worst_gap = 0.0, worst_sum = 0.0;
    std::string worst_case;
    for (const auto& spec : catalogue()) {
      const auto s = levy::simulate_increments(spec, 5000, 1.0, 11);
      const auto table = levy::build_ecf_table(s, levy::FrequencyGrid::for_models(4));
      for (int m : {1, 2, 4}) {
        const auto e = levy::spectral_g_hat(table, m, 1.0);
        const double norm = levy::empirical_norm(e);
        const double gap = std::fabs(sum_squares(levy::coefficients(e, 32 * m)) - norm) / norm;
        if (gap > worst_gap) {
          worst_gap = gap;
          worst_case = std::string(spec.name()) + " m=" + std::to_string(m);
        }
        worst_sum = std::max(worst_sum, std::fabs(levy::contrast(e) + norm));
      }
    }
    return Outcome{worst_gap < 1e-3 && worst_sum < 1e-12,
                   fmt("worst relative coefficient gap = %.3g", worst_gap) + " at " + worst_case +
                       fmt(", |contrast + norm| = %.3g", worst_sum)};
  });

  criterion(4, "reconstruction paths", 0.0, [] {
    const auto x = levy::linspace(-10.0, 10.0, 801);
    double worst = 0.0;
    for (const auto& spec : catalogue()) {
      const auto s = levy::simulate_increments(spec, 5000, 1.0, 7);
      const auto table = levy::build_ecf_table(s, levy::FrequencyGrid::for_models(4));
      const auto e = levy::spectral_g_hat(table, 4, 1.0);
      const auto direct = levy::reconstruct(e, x);
      const auto series = levy::coefficient_sum(levy::coefficients(e, 1024), 4, x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, std::fabs(direct[i] - series[i]));
      }
    }
    return Outcome{worst < 1e-3, fmt("sup gap = %.3g", worst)};
  });

  levy::CampaignResult desk;
  criterion(5, "risk decreases in n", 600.0, [&] {
    desk = levy::run_campaign(gamma_campaign({500, 2000, 8000}, 50));
    bool ok = true;
    std::string d;
    for (std::size_t i = 0; i < desk.aggregates.size(); ++i) {
      const auto& a = desk.aggregates[i];
      d += "n=" + std::to_string(a.n) + fmt(" mise=%.4g", a.mean_mise) + fmt("+-%.2g; ", a.se_mise);
      if (i > 0) {
        const auto& p = desk.aggregates[i - 1];
        ok = ok && p.mean_mise - a.mean_mise >= 2.0 * std::hypot(p.se_mise, a.se_mise);
      }
    }
    return Outcome{ok, d};
  });

  criterion(6, "oracle ratio", 0.0, [&] {
    double worst_mean = 0.0, worst_share = 1.0;
    for (const auto& a : desk.aggregates) {
      worst_mean = std::max(worst_mean, a.mean_oracle_ratio);
      worst_share = std::min(worst_share, a.share_ratio_within_4);
    }
    return Outcome{worst_mean <= 4.0 && worst_share >= 0.9,
                   fmt("largest mean ratio = %.3g", worst_mean) +
                       fmt(", smallest share within 4 = %.3g", worst_share)};
  });

  criterion(7, "rate slope", 1800.0, [] {
    const auto r = levy::run_campaign(gamma_campaign({500, 2000, 8000, 32000}, 100));
    const double slope = r.rate ? r.rate->slope : NAN;
    return Outcome{slope >= -0.40 && slope <= -0.10, fmt("slope = %.4f", slope)};
  });

  criterion(8, "degenerate penalties", 0.0, [] {
    std::size_t cases = 0, bad = 0;
    for (const auto& spec : {ModelSpec::levy_gamma(1.0, 1.0),
                             ModelSpec::compound_poisson_exponential(1.0, 1.0)}) {
      for (std::size_t n : {500u, 2000u, 8000u}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
          const auto s = levy::simulate_increments(spec, n, 1.0, seed);
          levy::PenaltyConfig pc;
          pc.beta_hint = 1.0;
          const int m_n = levy::build_collection(n, 1.0, pc).back();
          const auto table = levy::build_ecf_table(s, levy::FrequencyGrid::for_models(m_n));
          pc.kappa_prime = 0.0;
          bad += levy::select(s, pc, table).trace.m_hat != m_n;
          pc.kappa_prime = 1e9;
          bad += levy::select(s, pc, table).trace.m_hat != 1;
          cases += 2;
        }
      }
    }
    return Outcome{bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) +
                                 " selections at the expected end of the collection"};
  });

  criterion(9, "determinism", 0.0, [] {
    auto c = gamma_campaign({500, 2000}, 6);
    c.dump_estimates = 2;
    const fs::path root = fs::temp_directory_path() / "levy_acceptance";
    fs::remove_all(root);
    c.threads = 1;
    levy::io::export_campaign(levy::run_campaign(c), root / "a", false);
    c.threads = 0;
    levy::io::export_campaign(levy::run_campaign(c), root / "b", false);
    std::size_t files = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
      ++files;
      differ += slurp(e.path()) != slurp(root / "b" / e.path().filename());
    }
    fs::remove_all(root);
    return Outcome{files > 0 && differ == 0,
                   std::to_string(files - differ) + "/" + std::to_string(files) + " files identical"};
  });

  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
