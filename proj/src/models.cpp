#include "levy/models.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"
#include "levy/rng.hpp"

namespace levy {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(field, "must be a finite value > 0, got " + std::to_string(v));
  }
}

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ParameterError(field, "must be finite");
}

// pi/2 - atan(x/a), accurate for large x.
double arctan_tail(double x, double a) { return std::atan2(a, x); }

// Integral over u > L of 1/(a^2 + u^2).
double lorentz_tail(double a, double L) { return arctan_tail(L, a) / a; }

double gaussian_tail_energy(const CompoundPoissonGaussian& p, double L) {
  const double c2 = p.intensity * p.intensity;
  const double mu2 = p.jump_mean * p.jump_mean;
  const double s2 = p.jump_sd * p.jump_sd;
  auto integrand = [&](double u) {
    return c2 * (mu2 + s2 * s2 * u * u) * std::exp(-s2 * u * u);
  };
  // Integrate on [L, U] where the analytic bound on the remainder beyond U,
  // e^{-s2 U^2} (mu2/(2 s2 U) + s2 U/2 + 1/(4U)) c2, is negligible.
  auto remainder_bound = [&](double U) {
    return c2 * std::exp(-s2 * U * U) * (mu2 / (2.0 * s2 * U) + s2 * U / 2.0 + 1.0 / (4.0 * U));
  };
  double U = std::max(L, 1.0 / p.jump_sd);
  while (remainder_bound(U) > 1e-17) U *= 1.25;
  if (U <= L) return 0.0;
  // Split so the peak at u ~ 1/sigma is resolved.
  double total = 0.0;
  const double pieces = 16.0;
  const double width = (U - L) / pieces;
  for (int k = 0; k < 16; ++k) {
    total += quad::adaptive_simpson(integrand, L + k * width, L + (k + 1) * width, 1e-15);
  }
  return 2.0 * total;
}

std::map<std::string, double>::const_iterator find_param(
    const std::map<std::string, double>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ParameterError(key, "missing model parameter");
  return it;
}

}  // namespace

ModelSpec ModelSpec::compound_poisson_gaussian(double intensity, double jump_mean,
                                               double jump_sd) {
  require_positive(intensity, "c");
  require_finite(jump_mean, "mu");
  require_positive(jump_sd, "sigma");
  return ModelSpec(CompoundPoissonGaussian{intensity, jump_mean, jump_sd});
}

ModelSpec ModelSpec::compound_poisson_exponential(double intensity, double jump_rate) {
  require_positive(intensity, "c");
  require_positive(jump_rate, "lambda");
  return ModelSpec(CompoundPoissonExponential{intensity, jump_rate});
}

ModelSpec ModelSpec::levy_gamma(double beta, double alpha) {
  require_positive(beta, "beta");
  require_positive(alpha, "alpha");
  return ModelSpec(LevyGamma{beta, alpha});
}

ModelSpec ModelSpec::bilateral_gamma(double beta_pos, double alpha_pos, double beta_neg,
                                     double alpha_neg) {
  require_positive(beta_pos, "beta");
  require_positive(alpha_pos, "alpha");
  require_positive(beta_neg, "beta2");
  require_positive(alpha_neg, "alpha2");
  return ModelSpec(BilateralGamma{beta_pos, alpha_pos, beta_neg, alpha_neg});
}

ModelSpec ModelSpec::variance_gamma(double beta, double alpha) {
  require_positive(beta, "beta");
  require_positive(alpha, "alpha");
  return ModelSpec(VarianceGamma{beta, alpha});
}

std::vector<std::string_view> model_names() {
  return {"compound-poisson-gaussian", "compound-poisson-exponential", "levy-gamma",
          "bilateral-gamma", "variance-gamma"};
}

ModelSpec ModelSpec::from_named(std::string_view kind,
                                const std::map<std::string, double>& params) {
  std::vector<std::string> expected;
  if (kind == "compound-poisson-gaussian") {
    expected = {"c", "mu", "sigma"};
  } else if (kind == "compound-poisson-exponential") {
    expected = {"c", "lambda"};
  } else if (kind == "levy-gamma" || kind == "variance-gamma") {
    expected = {"beta", "alpha"};
  } else if (kind == "bilateral-gamma") {
    expected = {"beta", "alpha", "beta2", "alpha2"};
  } else {
    throw ParameterError("model", "unknown model kind '" + std::string(kind) + "'");
  }
  const std::set<std::string> allowed(expected.begin(), expected.end());
  for (const auto& [key, value] : params) {
    if (!allowed.count(key)) {
      throw ParameterError(key, "not a parameter of model '" + std::string(kind) + "'");
    }
  }
  auto get = [&](const std::string& key) { return find_param(params, key)->second; };
  if (kind == "compound-poisson-gaussian") {
    return compound_poisson_gaussian(get("c"), get("mu"), get("sigma"));
  }
  if (kind == "compound-poisson-exponential") {
    return compound_poisson_exponential(get("c"), get("lambda"));
  }
  if (kind == "levy-gamma") return levy_gamma(get("beta"), get("alpha"));
  if (kind == "variance-gamma") return variance_gamma(get("beta"), get("alpha"));
  return bilateral_gamma(get("beta"), get("alpha"), get("beta2"), get("alpha2"));
}

ModelKind ModelSpec::kind() const noexcept {
  return static_cast<ModelKind>(params_.index());
}

std::string_view ModelSpec::name() const noexcept {
  return model_names()[params_.index()];
}

std::vector<std::pair<std::string, double>> ModelSpec::named_params() const {
  return std::visit(
      overloaded{
          [](const CompoundPoissonGaussian& p) -> std::vector<std::pair<std::string, double>> {
            return {{"c", p.intensity}, {"mu", p.jump_mean}, {"sigma", p.jump_sd}};
          },
          [](const CompoundPoissonExponential& p) -> std::vector<std::pair<std::string, double>> {
            return {{"c", p.intensity}, {"lambda", p.jump_rate}};
          },
          [](const LevyGamma& p) -> std::vector<std::pair<std::string, double>> {
            return {{"beta", p.beta}, {"alpha", p.alpha}};
          },
          [](const BilateralGamma& p) -> std::vector<std::pair<std::string, double>> {
            return {{"beta", p.beta_pos},
                    {"alpha", p.alpha_pos},
                    {"beta2", p.beta_neg},
                    {"alpha2", p.alpha_neg}};
          },
          [](const VarianceGamma& p) -> std::vector<std::pair<std::string, double>> {
            return {{"beta", p.beta}, {"alpha", p.alpha}};
          },
      },
      params_);
}

bool ModelSpec::is_subordinator() const noexcept {
  return kind() == ModelKind::compound_poisson_exponential || kind() == ModelKind::levy_gamma;
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  return a.kind() == b.kind() && a.named_params() == b.named_params();
}

void validate_sample(const IncrementSample& sample) {
  if (sample.values.empty()) throw EmptySampleError();
  if (!(sample.delta > 0.0) || !std::isfinite(sample.delta)) {
    throw ParameterError("delta", "must be a finite value > 0");
  }
}

IncrementSample simulate_increments(const ModelSpec& spec, std::size_t n, double delta,
                                    std::uint64_t seed) {
  if (n == 0) throw EmptySampleError();
  require_positive(delta, "delta");

  Rng rng(derive_seed(seed, StreamPurpose::simulation));
  IncrementSample out;
  out.delta = delta;
  out.seed = seed;
  out.model = spec;
  out.values.resize(n);

  std::visit(overloaded{
                 [&](const CompoundPoissonGaussian& p) {
                   for (double& z : out.values) {
                     const auto jumps = rng.poisson(p.intensity * delta);
                     double s = 0.0;
                     for (std::uint64_t j = 0; j < jumps; ++j) {
                       s += p.jump_mean + p.jump_sd * rng.normal();
                     }
                     z = s;
                   }
                 },
                 [&](const CompoundPoissonExponential& p) {
                   for (double& z : out.values) {
                     const auto jumps = rng.poisson(p.intensity * delta);
                     double s = 0.0;
                     for (std::uint64_t j = 0; j < jumps; ++j) s += rng.exponential(p.jump_rate);
                     z = s;
                   }
                 },
                 [&](const LevyGamma& p) {
                   for (double& z : out.values) z = rng.gamma(p.beta * delta, p.alpha);
                 },
                 [&](const BilateralGamma& p) {
                   for (double& z : out.values) {
                     const double up = rng.gamma(p.beta_pos * delta, p.alpha_pos);
                     const double down = rng.gamma(p.beta_neg * delta, p.alpha_neg);
                     z = up - down;
                   }
                 },
                 [&](const VarianceGamma& p) {
                   for (double& z : out.values) {
                     const double clock = rng.gamma(p.beta * delta, p.alpha);
                     z = std::sqrt(clock) * rng.normal();
                   }
                 },
             },
             spec.params());
  return out;
}

cplx psi_true(const ModelSpec& spec, double delta, double u) {
  require_positive(delta, "delta");
  if (u == 0.0) return {1.0, 0.0};
  const cplx i{0.0, 1.0};
  return std::visit(
      overloaded{
          [&](const CompoundPoissonGaussian& p) {
            const double s2 = p.jump_sd * p.jump_sd;
            const cplx jump_cf = std::exp(i * p.jump_mean * u - 0.5 * s2 * u * u);
            return std::exp(p.intensity * delta * (jump_cf - 1.0));
          },
          [&](const CompoundPoissonExponential& p) {
            return std::exp(p.intensity * delta * (i * u) / (p.jump_rate - i * u));
          },
          [&](const LevyGamma& p) {
            return std::exp(p.beta * delta * std::log(p.alpha / (p.alpha - i * u)));
          },
          [&](const BilateralGamma& p) {
            return std::exp(p.beta_pos * delta * std::log(p.alpha_pos / (p.alpha_pos - i * u)) +
                            p.beta_neg * delta * std::log(p.alpha_neg / (p.alpha_neg + i * u)));
          },
          [&](const VarianceGamma& p) {
            return cplx(std::pow(p.alpha / (p.alpha + 0.5 * u * u), delta * p.beta), 0.0);
          },
      },
      spec.params());
}

double g_true(const ModelSpec& spec, double x) {
  return std::visit(
      overloaded{
          [&](const CompoundPoissonGaussian& p) {
            const double t = (x - p.jump_mean) / p.jump_sd;
            return p.intensity * x * std::exp(-0.5 * t * t) / (p.jump_sd * std::sqrt(2.0 * kPi));
          },
          [&](const CompoundPoissonExponential& p) {
            if (x < 0.0) return 0.0;
            return p.intensity * x * p.jump_rate * std::exp(-p.jump_rate * x);
          },
          [&](const LevyGamma& p) {
            if (x < 0.0) return 0.0;
            return p.beta * std::exp(-p.alpha * x);
          },
          [&](const BilateralGamma& p) {
            if (x > 0.0) return p.beta_pos * std::exp(-p.alpha_pos * x);
            if (x < 0.0) return -p.beta_neg * std::exp(p.alpha_neg * x);
            return 0.5 * (p.beta_pos - p.beta_neg);
          },
          [&](const VarianceGamma& p) {
            if (x == 0.0) return 0.0;
            const double sign = x > 0.0 ? 1.0 : -1.0;
            return sign * p.beta * std::exp(-std::sqrt(2.0 * p.alpha) * std::fabs(x));
          },
      },
      spec.params());
}

cplx g_star_true(const ModelSpec& spec, double u) {
  const cplx i{0.0, 1.0};
  return std::visit(
      overloaded{
          [&](const CompoundPoissonGaussian& p) {
            const double s2 = p.jump_sd * p.jump_sd;
            return p.intensity * (p.jump_mean + i * s2 * u) *
                   std::exp(i * p.jump_mean * u - 0.5 * s2 * u * u);
          },
          [&](const CompoundPoissonExponential& p) {
            const cplx d = p.jump_rate - i * u;
            return p.intensity * p.jump_rate / (d * d);
          },
          [&](const LevyGamma& p) { return p.beta / (p.alpha - i * u); },
          [&](const BilateralGamma& p) {
            return p.beta_pos / (p.alpha_pos - i * u) - p.beta_neg / (p.alpha_neg + i * u);
          },
          [&](const VarianceGamma& p) {
            return 2.0 * i * p.beta * u / (2.0 * p.alpha + u * u);
          },
      },
      spec.params());
}

double tail_energy(const ModelSpec& spec, double m) {
  if (!(m >= 0.0)) throw ParameterError("m", "must be >= 0");
  const double L = kPi * m;
  return std::visit(
      overloaded{
          [&](const CompoundPoissonGaussian& p) { return gaussian_tail_energy(p, L); },
          [&](const CompoundPoissonExponential& p) {
            // |g*|^2 = c^2 lambda^2 / (lambda^2 + u^2)^2
            const double l = p.jump_rate;
            const double one_side =
                (arctan_tail(L, l) - l * L / (l * l + L * L)) / (2.0 * l * l * l);
            return 2.0 * p.intensity * p.intensity * l * l * one_side;
          },
          [&](const LevyGamma& p) {
            return 2.0 * p.beta * p.beta * lorentz_tail(p.alpha, L);
          },
          [&](const BilateralGamma& p) {
            const double a = p.alpha_pos, b = p.alpha_neg;
            // Cross term: integral over u > L of (ab - u^2)/((a^2+u^2)(b^2+u^2)).
            double cross;
            if (std::fabs(a - b) <= 1e-8 * std::max(a, b)) {
              cross = -L / (a * a + L * L);
            } else {
              cross = (arctan_tail(L, a) - arctan_tail(L, b)) / (b - a);
            }
            const double one_side = p.beta_pos * p.beta_pos * lorentz_tail(a, L) +
                                    p.beta_neg * p.beta_neg * lorentz_tail(b, L) -
                                    2.0 * p.beta_pos * p.beta_neg * cross;
            return 2.0 * one_side;
          },
          [&](const VarianceGamma& p) {
            // |g*|^2 = 4 beta^2 u^2 / (a^2 + u^2)^2 with a^2 = 2 alpha
            const double a = std::sqrt(2.0 * p.alpha);
            const double one_side = arctan_tail(L, a) / (2.0 * a) + L / (2.0 * (a * a + L * L));
            return 2.0 * 4.0 * p.beta * p.beta * one_side;
          },
      },
      spec.params());
}

double g_squared_norm(const ModelSpec& spec) { return tail_energy(spec, 0.0) / (2.0 * kPi); }

MomentSet moments(const ModelSpec& spec, int p, double delta) {
  if (p < 1 || p > 8) {
    throw UnsupportedOrderError("moment order must be in 1..8, got " + std::to_string(p));
  }
  require_positive(delta, "delta");
  auto factorial = [](int k) {
    double f = 1.0;
    for (int j = 2; j <= k; ++j) f *= j;
    return f;
  };
  // M_k for k = 1..max(p, 2); the first two are always needed.
  const int order = std::max(p, 2);
  std::vector<double> m(order);
  std::visit(overloaded{
                 [&](const CompoundPoissonGaussian& q) {
                   // Raw moments of N(mu, s^2): E Y^k = mu E Y^{k-1} + (k-1) s^2 E Y^{k-2}.
                   const double s2 = q.jump_sd * q.jump_sd;
                   double prev2 = 1.0, prev1 = q.jump_mean;
                   m[0] = q.intensity * prev1;
                   for (int k = 2; k <= order; ++k) {
                     const double next = q.jump_mean * prev1 + (k - 1) * s2 * prev2;
                     m[k - 1] = q.intensity * next;
                     prev2 = prev1;
                     prev1 = next;
                   }
                 },
                 [&](const CompoundPoissonExponential& q) {
                   for (int k = 1; k <= order; ++k) {
                     m[k - 1] = q.intensity * factorial(k) / std::pow(q.jump_rate, k);
                   }
                 },
                 [&](const LevyGamma& q) {
                   for (int k = 1; k <= order; ++k) {
                     m[k - 1] = q.beta * factorial(k - 1) / std::pow(q.alpha, k);
                   }
                 },
                 [&](const BilateralGamma& q) {
                   for (int k = 1; k <= order; ++k) {
                     const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                     m[k - 1] = factorial(k - 1) * (q.beta_pos / std::pow(q.alpha_pos, k) +
                                                    sign * q.beta_neg / std::pow(q.alpha_neg, k));
                   }
                 },
                 [&](const VarianceGamma& q) {
                   const double a = std::sqrt(2.0 * q.alpha);
                   for (int k = 1; k <= order; ++k) {
                     m[k - 1] = (k % 2 == 0) ? 2.0 * q.beta * factorial(k - 1) / std::pow(a, k) : 0.0;
                   }
                 },
             },
             spec.params());

  MomentSet out;
  out.mean_z = delta * m[0];
  out.var_z = delta * m[1];
  out.second_moment_z = out.var_z + out.mean_z * out.mean_z;
  m.resize(p);
  out.m = std::move(m);
  return out;
}

}  // namespace levy
