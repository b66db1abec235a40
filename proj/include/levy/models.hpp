#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace levy {

using cplx = std::complex<double>;

// Parameter blocks. Rates, intensities and standard deviations are strictly
// positive; ModelSpec's factories enforce that.

/// Compound Poisson with N(jump_mean, jump_sd^2) jumps.
struct CompoundPoissonGaussian {
  double intensity;
  double jump_mean;
  double jump_sd;
};

/// Compound Poisson with Exp(jump_rate) jumps (a subordinator).
struct CompoundPoissonExponential {
  double intensity;
  double jump_rate;
};

/// Gamma subordinator: L_t ~ Gamma(shape = beta * t, rate = alpha).
struct LevyGamma {
  double beta;
  double alpha;
};

/// Difference of two independent gamma subordinators.
struct BilateralGamma {
  double beta_pos;
  double alpha_pos;
  double beta_neg;
  double alpha_neg;
};

/// Brownian motion time-changed by a gamma subordinator with (beta, alpha).
struct VarianceGamma {
  double beta;
  double alpha;
};

enum class ModelKind {
  compound_poisson_gaussian,
  compound_poisson_exponential,
  levy_gamma,
  bilateral_gamma,
  variance_gamma,
};

/// A catalogued pure-jump Levy model.
class ModelSpec {
 public:
  using Params = std::variant<CompoundPoissonGaussian, CompoundPoissonExponential,
                              LevyGamma, BilateralGamma, VarianceGamma>;

  static ModelSpec compound_poisson_gaussian(double intensity, double jump_mean,
                                             double jump_sd);
  static ModelSpec compound_poisson_exponential(double intensity, double jump_rate);
  static ModelSpec levy_gamma(double beta, double alpha);
  static ModelSpec bilateral_gamma(double beta_pos, double alpha_pos, double beta_neg,
                                   double alpha_neg);
  static ModelSpec variance_gamma(double beta, double alpha);

  /// Builds a model from its catalogue name and named parameters, e.g.
  /// ("levy-gamma", {{"alpha", 1}, {"beta", 1}}). Unknown or missing
  /// parameter names raise ParameterError.
  static ModelSpec from_named(std::string_view kind,
                              const std::map<std::string, double>& params);

  ModelKind kind() const noexcept;
  const Params& params() const noexcept { return params_; }
  /// Catalogue name ("levy-gamma", ...).
  std::string_view name() const noexcept;
  /// Named parameters in a stable order, matching from_named().
  std::vector<std::pair<std::string, double>> named_params() const;
  /// True when all jumps are nonnegative.
  bool is_subordinator() const noexcept;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b);

 private:
  explicit ModelSpec(Params p) : params_(p) {}
  Params params_;
};

std::vector<std::string_view> model_names();

/// n increments Z_k = L_{k delta} - L_{(k-1) delta} with provenance.
struct IncrementSample {
  double delta = 1.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::optional<ModelSpec> model;

  std::size_t size() const noexcept { return values.size(); }
};

/// Throws EmptySampleError or ParameterError if the sample is unusable.
void validate_sample(const IncrementSample& sample);

struct MomentSet {
  /// m[k-1] = M_k = integral of x^{k-1} g(x) dx.
  std::vector<double> m;
  double mean_z = 0.0;
  double var_z = 0.0;
  /// E[Z^2] = var_z + mean_z^2.
  double second_moment_z = 0.0;
};

/// Exact i.i.d. draws from the law of L_delta. Deterministic in
/// (spec, n, delta, seed).
IncrementSample simulate_increments(const ModelSpec& spec, std::size_t n, double delta,
                                    std::uint64_t seed);

/// Characteristic function of L_delta.
cplx psi_true(const ModelSpec& spec, double delta, double u);

/// g(x) = x n(x). At the jump x = 0 subordinators are right-continuous and
/// bilateral models take the average of both one-sided limits.
double g_true(const ModelSpec& spec, double x);

/// Fourier transform of g: integral of e^{iux} g(x) dx.
cplx g_star_true(const ModelSpec& spec, double u);

/// Integral of |g*(u)|^2 over |u| > pi m.
double tail_energy(const ModelSpec& spec, double m);

/// ||g||^2 = (1/2pi) * integral of |g*|^2 = tail_energy(spec, 0) / 2pi.
double g_squared_norm(const ModelSpec& spec);

/// Moments M_1..M_p (1 <= p <= 8) and the first two moments of L_delta.
MomentSet moments(const ModelSpec& spec, int p, double delta);

}  // namespace levy
