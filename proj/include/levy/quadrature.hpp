#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levy::quad {

using cplx = std::complex<double>;

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

/// Composite Simpson of samples `f` (spacing h) over [center - half, center + half]
/// in index units. `half` must be even.
///
/// Panels are added pairwise from the center outward, so for nonnegative
/// integrands the result is nondecreasing in `half` in floating point too,
/// and it is bit-identical to the matching entry of nested_simpson().
double simpson_band(std::span<const double> f, std::size_t center, std::size_t half,
                    double h);

/// Every simpson_band() value for half = 0, 2, 4, ..., max_half in one pass;
/// entry p is the integral with half = 2p.
std::vector<double> nested_simpson(std::span<const double> f, std::size_t center,
                                   std::size_t max_half, double h);

/// Filon-Simpson: exact integral of Q(u) e^{i omega u}, where Q is the
/// piecewise quadratic through the samples `f` taken at u_first + k h.
/// Reduces to composite Simpson at omega = 0. f.size() must be odd.
cplx filon_simpson(std::span<const cplx> f, double u_first, double h, double omega);

}  // namespace levy::quad
