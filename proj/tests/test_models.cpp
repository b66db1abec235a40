#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "levy/errors.hpp"
#include "levy/models.hpp"
#include "oracles.hpp"

using levy::ModelSpec;
using levy::cplx;

namespace {

constexpr double kPi = oracle::kPi;

std::vector<ModelSpec> catalogue() {
  return {ModelSpec::compound_poisson_gaussian(2.0, 0.5, 1.0),
          ModelSpec::compound_poisson_gaussian(1.5, -1.0, 0.4),
          ModelSpec::compound_poisson_exponential(1.0, 1.0),
          ModelSpec::compound_poisson_exponential(3.0, 2.5),
          ModelSpec::levy_gamma(1.0, 1.0),
          ModelSpec::levy_gamma(0.5, 2.0),
          ModelSpec::bilateral_gamma(1.0, 1.0, 1.5, 2.0),
          ModelSpec::bilateral_gamma(1.0, 1.0, 1.0, 1.0),
          ModelSpec::variance_gamma(1.0, 1.0),
          ModelSpec::variance_gamma(2.0, 0.5)};
}

}  // namespace

TEST_CASE("parameter domain") {
  CHECK_THROWS_AS(ModelSpec::compound_poisson_gaussian(0.0, 0.0, 1.0), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::compound_poisson_gaussian(1.0, 0.0, 0.0), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::compound_poisson_exponential(1.0, -1.0), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::levy_gamma(1.0, 0.0), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::bilateral_gamma(1.0, 1.0, 1.0, NAN), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::variance_gamma(-2.0, 1.0), levy::ParameterError);
  try {
    ModelSpec::compound_poisson_gaussian(0.0, 0.0, 1.0);
  } catch (const levy::ParameterError& e) {
    CHECK(e.field() == "c");
  }
}

TEST_CASE("named construction round trip") {
  for (const auto& spec : catalogue()) {
    std::map<std::string, double> params;
    for (const auto& [k, v] : spec.named_params()) params[k] = v;
    CHECK(ModelSpec::from_named(spec.name(), params) == spec);
  }
  CHECK_THROWS_AS(ModelSpec::from_named("gamma", {{"alpha", 1.0}}), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::from_named("levy-gamma", {{"alpha", 1.0}}), levy::ParameterError);
  CHECK_THROWS_AS(ModelSpec::from_named("levy-gamma", {{"alpha", 1.0}, {"beta", 1.0}, {"mu", 0.0}}),
                  levy::ParameterError);
  CHECK(levy::model_names().size() == 5);
}

TEST_CASE("simulate_increments") {
  SUBCASE("empty sample") {
    CHECK_THROWS_AS(levy::simulate_increments(ModelSpec::levy_gamma(1, 1), 0, 1.0, 1),
                    levy::EmptySampleError);
    CHECK_THROWS_AS(levy::simulate_increments(ModelSpec::levy_gamma(1, 1), 10, 0.0, 1),
                    levy::ParameterError);
  }
  SUBCASE("gamma sample mean") {
    const auto s = levy::simulate_increments(ModelSpec::levy_gamma(1.0, 1.0), 100000, 1.0, 11);
    double mean = 0.0;
    for (double z : s.values) mean += z;
    mean /= s.size();
    CHECK(mean >= 0.97);
    CHECK(mean <= 1.03);
    CHECK(*std::min_element(s.values.begin(), s.values.end()) >= 0.0);
    CHECK(s.model.has_value());
    CHECK(s.seed == 11);
  }
  SUBCASE("symmetric bilateral sample mean") {
    const auto s =
        levy::simulate_increments(ModelSpec::bilateral_gamma(1, 1, 1, 1), 100000, 1.0, 12);
    double mean = 0.0;
    for (double z : s.values) mean += z;
    mean /= s.size();
    CHECK(mean >= -0.05);
    CHECK(mean <= 0.05);
  }
  SUBCASE("bit-identical reruns") {
    for (const auto& spec : catalogue()) {
      const auto a = levy::simulate_increments(spec, 500, 0.7, 99);
      const auto b = levy::simulate_increments(spec, 500, 0.7, 99);
      const auto c = levy::simulate_increments(spec, 500, 0.7, 100);
      CHECK(a.values == b.values);
      CHECK(a.values != c.values);
    }
  }
  SUBCASE("subordinators are nonnegative") {
    for (const auto& spec : catalogue()) {
      if (!spec.is_subordinator()) continue;
      const auto s = levy::simulate_increments(spec, 20000, 0.3, 5);
      CHECK(*std::min_element(s.values.begin(), s.values.end()) >= 0.0);
    }
  }
}

TEST_CASE("simulated moments match the moment set") {
  const std::size_t n = 200000;
  for (double delta : {1.0, 0.4}) {
    for (const auto& spec : catalogue()) {
      CAPTURE(spec.name());
      CAPTURE(delta);
      const auto s = levy::simulate_increments(spec, n, delta, 2024);
      const auto mom = levy::moments(spec, 4, delta);
      double mean = 0.0;
      for (double z : s.values) mean += z;
      mean /= n;
      double var = 0.0;
      for (double z : s.values) var += (z - mean) * (z - mean);
      var /= (n - 1);
      const double k2 = delta * mom.m[1], k4 = delta * mom.m[3];
      CHECK(std::fabs(mean - mom.mean_z) <= 4.0 * std::sqrt(k2 / n));
      CHECK(std::fabs(var - mom.var_z) <= 4.0 * std::sqrt((k4 + 2.0 * k2 * k2) / n));
    }
  }
}

TEST_CASE("empirical characteristic function of simulated data") {
  const std::size_t n = 100000;
  for (const auto& spec : catalogue()) {
    CAPTURE(spec.name());
    const auto s = levy::simulate_increments(spec, n, 1.0, 77);
    double worst = 0.0;
    for (int k = -100; k <= 100; ++k) {
      const double u = 0.1 * k;
      cplx sum = 0.0;
      for (double z : s.values) sum += std::exp(cplx(0.0, u * z));
      worst = std::max(worst, std::abs(sum / double(n) - levy::psi_true(spec, 1.0, u)));
    }
    CHECK(worst <= 5.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("psi_true") {
  const auto lg = ModelSpec::levy_gamma(1.0, 1.0);
  const cplx v = levy::psi_true(lg, 1.0, 1.0);
  CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(v) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  const cplx vg = levy::psi_true(ModelSpec::variance_gamma(1.0, 1.0), 2.0, 2.0);
  CHECK(vg.real() == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(vg.imag() == 0.0);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (const auto& spec : catalogue()) {
    for (double delta : {0.1, 1.0, 3.0}) {
      CHECK(levy::psi_true(spec, delta, 0.0) == cplx(1.0, 0.0));
      for (int i = 0; i < 100; ++i) {
        const double u = dist(gen);
        const cplx a = levy::psi_true(spec, delta, u);
        const cplx b = levy::psi_true(spec, delta, -u);
        CHECK(a == std::conj(b));
        CHECK(std::abs(a) <= 1.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("g_true") {
  CHECK(levy::g_true(ModelSpec::levy_gamma(2.0, 3.0), 0.0) == 2.0);
  CHECK(levy::g_true(ModelSpec::levy_gamma(2.0, 3.0), -0.1) == 0.0);
  CHECK(levy::g_true(ModelSpec::bilateral_gamma(1, 1, 1, 1), 0.0) == 0.0);
  CHECK(levy::g_true(ModelSpec::compound_poisson_exponential(1.0, 1.0), 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(levy::g_true(ModelSpec::variance_gamma(1.5, 2.0), -0.5) ==
        doctest::Approx(-1.5 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(levy::g_true(ModelSpec::variance_gamma(1.5, 2.0), 0.0) == 0.0);
}

TEST_CASE("g_star_true") {
  const cplx a = levy::g_star_true(ModelSpec::levy_gamma(2.0, 4.0), 0.0);
  CHECK(a.real() == doctest::Approx(0.5));
  CHECK(a.imag() == 0.0);
  CHECK(levy::g_star_true(ModelSpec::bilateral_gamma(1, 1, 1, 1), 0.0) == cplx(0.0, 0.0));
  const cplx b = levy::g_star_true(ModelSpec::compound_poisson_exponential(1.0, 1.0), 1.0);
  CHECK(b.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.imag() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("g_star_true is the Fourier transform of g_true") {
  for (const auto& spec : catalogue()) {
    CAPTURE(spec.name());
    double worst = 0.0;
    for (int k = -40; k <= 40; ++k) {
      const double u = 0.5 * k;
      worst = std::max(worst, std::abs(oracle::fourier_of_g(spec, u) - levy::g_star_true(spec, u)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("tail_energy") {
  const auto lg = ModelSpec::levy_gamma(1.0, 1.0);
  CHECK(levy::tail_energy(lg, 0.0) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(levy::tail_energy(lg, 1.0) == doctest::Approx(2.0 * (kPi / 2 - std::atan(kPi))).epsilon(1e-14));
  CHECK(levy::tail_energy(lg, 1e6) < 1e-5);
  CHECK_THROWS_AS(levy::tail_energy(lg, -1.0), levy::ParameterError);

  for (const auto& spec : catalogue()) {
    CAPTURE(spec.name());
    double prev = INFINITY;
    for (double m : {0.0, 0.25, 1.0, 2.0, 3.0, 5.0, 8.0, 16.0, 64.0}) {
      CAPTURE(m);
      const double t = levy::tail_energy(spec, m);
      CHECK(t <= prev);
      CHECK(t >= 0.0);
      prev = t;
      CHECK(std::fabs(t - oracle::tail_energy_numeric(spec, m)) < 1e-8);
    }
    CHECK(levy::tail_energy(spec, 1e9) < 1e-7);
  }
}

TEST_CASE("compound Poisson Gaussian tail matches the erfc form") {
  for (auto [c, mu, sigma] : {std::tuple{2.0, 0.5, 1.0}, std::tuple{1.5, -1.0, 0.4},
                              std::tuple{0.7, 3.0, 2.0}}) {
    const auto spec = ModelSpec::compound_poisson_gaussian(c, mu, sigma);
    for (double m : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      CHECK(levy::tail_energy(spec, m) ==
            doctest::Approx(oracle::cp_gaussian_tail(c, mu, sigma, m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("g_squared_norm") {
  CHECK(levy::g_squared_norm(ModelSpec::levy_gamma(1.0, 1.0)) == doctest::Approx(0.5));
  CHECK(levy::g_squared_norm(ModelSpec::levy_gamma(3.0, 2.0)) == doctest::Approx(9.0 / 4.0));
}

TEST_CASE("moments") {
  const auto lg = levy::moments(ModelSpec::levy_gamma(1.0, 1.0), 2, 1.0);
  CHECK(lg.m[0] == doctest::Approx(1.0));
  CHECK(lg.m[1] == doctest::Approx(1.0));
  CHECK(lg.mean_z == doctest::Approx(1.0));
  CHECK(lg.var_z == doctest::Approx(1.0));
  CHECK(lg.second_moment_z == doctest::Approx(2.0));

  CHECK(levy::moments(ModelSpec::bilateral_gamma(1, 1, 1, 1), 1, 1.0).m[0] == 0.0);

  const auto cp = levy::moments(ModelSpec::compound_poisson_gaussian(2.0, 0.0, 1.0), 2, 1.0);
  CHECK(cp.m[0] == doctest::Approx(0.0));
  CHECK(cp.m[1] == doctest::Approx(2.0));

  // Gamma(beta delta, alpha): M_k = beta (k-1)! / alpha^k.
  const auto g = levy::moments(ModelSpec::levy_gamma(0.7, 2.0), 8, 0.5);
  double fact = 1.0;
  for (int k = 1; k <= 8; ++k) {
    if (k > 1) fact *= (k - 1);
    CHECK(g.m[k - 1] == doctest::Approx(0.7 * fact / std::pow(2.0, k)).epsilon(1e-13));
  }
  CHECK(g.second_moment_z == doctest::Approx(0.35 * 1.35 / 4.0).epsilon(1e-13));

  CHECK_THROWS_AS(levy::moments(ModelSpec::levy_gamma(1, 1), 0, 1.0), levy::UnsupportedOrderError);
  CHECK_THROWS_AS(levy::moments(ModelSpec::levy_gamma(1, 1), 9, 1.0), levy::UnsupportedOrderError);
}

TEST_CASE("moments agree with g by quadrature") {
  for (const auto& spec : catalogue()) {
    CAPTURE(spec.name());
    const double delta = 0.8;
    const auto mom = levy::moments(spec, 6, delta);
    for (int k = 1; k <= 6; ++k) {
      auto f = [&](double x) { return std::pow(x, k - 1) * levy::g_true(spec, x); };
      double q = 0.0;
      for (int j = 0; j < 240; ++j) {
        q += oracle::integrate(f, -60.0 + 0.25 * j, -60.0 + 0.25 * (j + 1) - (j == 239 ? 1e-300 : 0.0), 1e-14);
        q += oracle::integrate(f, 0.25 * j + (j == 0 ? 1e-300 : 0.0), 0.25 * (j + 1), 1e-14);
      }
      CHECK(mom.m[k - 1] == doctest::Approx(q).epsilon(1e-7).scale(1.0));
    }
    CHECK(mom.mean_z == doctest::Approx(delta * mom.m[0]));
    CHECK(mom.var_z == doctest::Approx(delta * mom.m[1]));
    CHECK(mom.second_moment_z == doctest::Approx(delta * mom.m[1] + delta * delta * mom.m[0] * mom.m[0]));
  }
}
