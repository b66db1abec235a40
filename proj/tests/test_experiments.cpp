#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "levy/ecf.hpp"
#include "levy/errors.hpp"
#include "levy/estimator.hpp"
#include "levy/experiments.hpp"

using levy::ExperimentConfig;
using levy::ModelSpec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_values = {300, 600, 1200};
  c.replications = 4;
  c.penalty.beta_hint = 1.0;
  c.root_seed = 99;
  return c;
}

void check_same(const levy::CampaignResult& a, const levy::CampaignResult& b) {
  REQUIRE(a.replications.size() == b.replications.size());
  for (std::size_t i = 0; i < a.replications.size(); ++i) {
    const auto& x = a.replications[i];
    const auto& y = b.replications[i];
    CHECK(x.seed == y.seed);
    CHECK(x.m_hat == y.m_hat);
    CHECK(x.mise_selected == y.mise_selected);
    CHECK(x.mise_per_m == y.mise_per_m);
    CHECK(x.unit_penalty == y.unit_penalty);
    CHECK(x.g_hat == y.g_hat);
    for (std::size_t k = 0; k < x.trace.rows.size(); ++k) {
      CHECK(x.trace.rows[k].objective == y.trace.rows[k].objective);
    }
  }
  REQUIRE(a.aggregates.size() == b.aggregates.size());
  for (std::size_t i = 0; i < a.aggregates.size(); ++i) {
    CHECK(a.aggregates[i].mean_mise == b.aggregates[i].mean_mise);
    CHECK(a.aggregates[i].sd_mise == b.aggregates[i].sd_mise);
  }
}

}  // namespace

TEST_CASE("ExperimentConfig validation") {
  auto field_of = [](const ExperimentConfig& c) {
    try {
      c.validate();
    } catch (const levy::ParameterError& e) {
      return e.field();
    }
    return std::string();
  };
  ExperimentConfig c = small_config();
  CHECK(field_of(c).empty());
  c.n_values = {};
  CHECK(field_of(c) == "n_values");
  c.n_values = {500, 500};
  CHECK(field_of(c) == "n_values");
  c.n_values = {1, 5};
  CHECK(field_of(c) == "n_values");
  c = small_config();
  c.replications = 0;
  CHECK(field_of(c) == "replications");
  c = small_config();
  c.delta = 0.0;
  CHECK(field_of(c) == "delta");
  c = small_config();
  c.x_points = 0;
  CHECK(field_of(c) == "x_points");
  c = small_config();
  c.penalty.epsilon = 2.0;
  CHECK(field_of(c) == "epsilon");
  c = small_config();
  c.grid.u_max = std::numbers::pi;
  CHECK_THROWS_AS(c.validate(), levy::GridCoverageError);
  c.grid.u_max.reset();
  c.grid.step = 0.3;
  CHECK_THROWS_AS(c.validate(), levy::Error);
}

TEST_CASE("replication seeds") {
  std::set<std::uint64_t> seen;
  for (std::size_t n : {500u, 2000u, 8000u}) {
    for (std::size_t r = 0; r < 100; ++r) seen.insert(levy::replication_seed(7, n, r));
  }
  CHECK(seen.size() == 300);
  CHECK(levy::replication_seed(7, 500, 3) == levy::replication_seed(7, 500, 3));
  CHECK(levy::replication_seed(7, 500, 3) != levy::replication_seed(8, 500, 3));
}

TEST_CASE("run_replication scores every model against the truth") {
  const auto c = small_config();
  const auto r = levy::run_replication(c, 1, 2);
  CHECK(r.n == 600);
  CHECK(r.rep == 2);
  CHECK(r.seed == levy::replication_seed(c.root_seed, 600, 2));
  const auto s = levy::simulate_increments(c.spec, r.n, c.delta, r.seed);
  const int m_n = levy::build_collection(r.n, c.delta, c.penalty).back();
  REQUIRE(r.mise_per_m.size() == static_cast<std::size_t>(m_n));
  const auto table = levy::build_ecf_table(s, levy::FrequencyGrid::for_models(m_n), 1.0);
  for (int m = 1; m <= m_n; ++m) {
    CHECK(r.mise_per_m[m - 1] == levy::mise_against_truth(levy::spectral_g_hat(table, m, 1.0), c.spec));
  }
  CHECK(r.mise_selected == r.mise_per_m[r.m_hat - 1]);
  CHECK(r.mise_selected >= r.mise_oracle - 1e-12);
  CHECK(r.mise_oracle == *std::min_element(r.mise_per_m.begin(), r.mise_per_m.end()));
  CHECK(r.mise_per_m[r.m_oracle - 1] == r.mise_oracle);
  CHECK(r.g_hat.empty());
}

TEST_CASE("campaigns are deterministic and thread-count independent") {
  auto c = small_config();
  c.dump_estimates = 2;
  const auto a = levy::run_campaign(c);
  const auto b = levy::run_campaign(c);
  check_same(a, b);
  c.threads = 3;
  check_same(a, levy::run_campaign(c));
  CHECK(a.replications.size() == 12);
  CHECK(a.replications[0].g_hat.size() == c.x_points);
  CHECK(a.replications[2].g_hat.empty());
  CHECK(a.rate.has_value());

  ExperimentConfig one;
  one.n_values = {500};
  one.replications = 1;
  one.root_seed = 5;
  one.penalty.beta_hint = 1.0;
  const auto x = levy::run_campaign(one);
  check_same(x, levy::run_campaign(one));
  CHECK(!x.rate.has_value());
}

TEST_CASE("observer sees replications in order") {
  auto c = small_config();
  c.threads = 4;
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  levy::run_campaign(c, [&](const levy::ReplicationResult& r) { seen.emplace_back(r.n_index, r.rep); });
  REQUIRE(seen.size() == 12);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    CHECK(seen[i].first == i / 4);
    CHECK(seen[i].second == i % 4);
  }
}

TEST_CASE("aggregate") {
  const auto c = small_config();
  auto res = levy::run_campaign(c);
  for (std::size_t i = 0; i < 3; ++i) {
    double mean = 0.0, m_hat = 0.0, ratio = 0.0;
    std::vector<double> v;
    for (const auto& r : res.replications) {
      if (r.n_index != i) continue;
      v.push_back(r.mise_selected);
      m_hat += r.m_hat;
      ratio += r.mise_selected / r.mise_oracle;
      CHECK(r.mise_selected >= r.mise_oracle - 1e-12);
    }
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const auto& a = res.aggregates[i];
    CHECK(a.n == c.n_values[i]);
    CHECK(a.mean_mise == doctest::Approx(mean).epsilon(1e-14));
    CHECK(a.sd_mise == doctest::Approx(std::sqrt(ss / (v.size() - 1))).epsilon(1e-12));
    CHECK(a.se_mise == doctest::Approx(a.sd_mise / 2.0).epsilon(1e-14));
    CHECK(a.mean_m_hat == doctest::Approx(m_hat / v.size()));
    CHECK(a.mean_oracle_ratio == doctest::Approx(ratio / v.size()));
    CHECK(a.mean_oracle_ratio >= 1.0 - 1e-12);
  }
  CHECK(levy::oracle_ratio(res).size() == 3);

  // Forcing the oracle choice gives a ratio of exactly one.
  for (auto& r : res.replications) {
    r.m_hat = r.m_oracle;
    r.mise_selected = r.mise_oracle;
  }
  levy::aggregate(res);
  for (double q : levy::oracle_ratio(res)) CHECK(q == 1.0);
}

TEST_CASE("zero penalty selects the largest model") {
  auto c = small_config();
  c.penalty.kappa_prime = 0.0;
  const auto res = levy::run_campaign(c);
  for (const auto& r : res.replications) {
    CHECK(r.m_hat == static_cast<int>(r.mise_per_m.size()));
    CHECK(r.mise_selected / r.mise_oracle == r.mise_per_m.back() / r.mise_oracle);
  }
}

TEST_CASE("fit_rate") {
  std::vector<double> nd = {500, 2000, 8000, 32000}, mise;
  for (double x : nd) mise.push_back(std::pow(x, -0.25));
  const auto f = levy::fit_rate(nd, mise);
  CHECK(std::fabs(f.slope + 0.25) < 1e-12);
  CHECK(std::fabs(f.intercept) < 1e-11);
  CHECK_THROWS_AS(levy::fit_rate({1, 2}, {1, 2}), levy::ParameterError);
  CHECK_THROWS_AS(levy::fit_rate({1, 2, 3}, {1, 0, 2}), levy::ParameterError);
  CHECK_THROWS_AS(levy::fit_rate({1, -2, 3}, {1, 1, 2}), levy::ParameterError);
  CHECK_THROWS_AS(levy::fit_rate({1, 2, 3}, {1, 2}), levy::ParameterError);
  CHECK_THROWS_AS(levy::fit_rate({2, 2, 2}, {1, 2, 3}), levy::ParameterError);
}

TEST_CASE("calibrate re-selects on the same replications") {
  const auto c = small_config();
  const auto res = levy::run_campaign(c);
  const auto rows = levy::calibrate(res, {0.5, c.penalty.kappa_prime, 8.0});
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& same = rows[3 + i];
    CHECK(same.kappa_prime == c.penalty.kappa_prime);
    CHECK(same.n == res.aggregates[i].n);
    CHECK(same.mean_mise == doctest::Approx(res.aggregates[i].mean_mise).epsilon(1e-14));
    CHECK(same.mean_m_hat == doctest::Approx(res.aggregates[i].mean_m_hat).epsilon(1e-14));
    CHECK(rows[i].mean_m_hat >= same.mean_m_hat);
    CHECK(rows[6 + i].mean_m_hat <= same.mean_m_hat);
  }
  for (const auto& r : rows) CHECK(r.mean_oracle_ratio >= 1.0 - 1e-12);
  CHECK_THROWS_AS(levy::calibrate(res, {-1.0}), levy::ParameterError);
}

TEST_CASE("desk campaigns") {
  ExperimentConfig lg;
  lg.penalty.beta_hint = 1.0;
  const auto a = levy::run_campaign(lg);
  for (std::size_t i = 1; i < a.aggregates.size(); ++i) {
    CHECK(a.aggregates[i].mean_mise < a.aggregates[i - 1].mean_mise);
  }
  const auto sweep = levy::calibrate(a, {0.5, 1.0, 2.0, 4.0, 8.0});
  CHECK(sweep.size() == 15);
  for (const auto& r : sweep) {
    MESSAGE("kappa' = " << r.kappa_prime << "  n = " << r.n << "  ratio = " << r.mean_oracle_ratio);
  }

  ExperimentConfig cpe = lg;
  cpe.spec = ModelSpec::compound_poisson_exponential(1.0, 1.0);
  cpe.penalty.beta_hint = 0.0;
  const auto b = levy::run_campaign(cpe);
  REQUIRE(a.rate.has_value());
  REQUIRE(b.rate.has_value());
  CHECK(b.rate->slope < a.rate->slope);
}
