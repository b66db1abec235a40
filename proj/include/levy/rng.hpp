#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace levy {

/// Stream tags for seed derivation. Each purpose gets an independent stream
/// derived from a single root seed.
enum class StreamPurpose : std::uint64_t {
  simulation = 1,
  replication = 2,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from `root` by folding in `purpose` and then each
/// counter in `path`. Depends only on the values, never on call order, so
/// work units can be evaluated in any order or in parallel.
std::uint64_t derive_seed(std::uint64_t root, StreamPurpose purpose,
                          std::initializer_list<std::uint64_t> path = {}) noexcept;

/// Random source with hand-written samplers on top of mt19937_64.
///
/// The standard library distributions are implementation-defined, so the
/// samplers here are spelled out to keep draws bit-identical across
/// toolchains for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  double exponential(double rate);
  /// Gamma with the given shape and rate (Marsaglia-Tsang; shape < 1 uses
  /// the U^{1/shape} boost).
  double gamma(double shape, double rate);
  /// Poisson: sequential inversion below mean 10, PTRS above.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levy
