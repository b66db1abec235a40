#include "levy/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace levy::quad {
namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double panel(std::span<const double> f, std::size_t first, double h) {
  return h / 3.0 * (f[first] + 4.0 * f[first + 1] + f[first + 2]);
}

// Integrals of t^k e^{i theta t} over [-1, 1] for k = 0, 1, 2.
std::array<cplx, 3> filon_moments(double theta) {
  if (std::fabs(theta) < 1.0) {
    double i0 = 0.0, i1 = 0.0, i2 = 0.0;
    double even = 1.0;  // theta^{2j} / (2j)!
    for (int j = 0; j < 14; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      const double odd = even * theta / (2.0 * j + 1.0);  // theta^{2j+1} / (2j+1)!
      i0 += sign * 2.0 * even / (2.0 * j + 1.0);
      i2 += sign * 2.0 * even / (2.0 * j + 3.0);
      i1 += sign * 2.0 * odd / (2.0 * j + 3.0);
      even = odd * theta / (2.0 * j + 2.0);
    }
    return {cplx(i0, 0.0), cplx(0.0, i1), cplx(i2, 0.0)};
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double t2 = theta * theta;
  const double i0 = 2.0 * s / theta;
  const double i1 = 2.0 * (s - theta * c) / t2;
  const double i2 = 2.0 * (t2 * s + 2.0 * theta * c - 2.0 * s) / (t2 * theta);
  return {cplx(i0, 0.0), cplx(0.0, i1), cplx(i2, 0.0)};
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double simpson_band(std::span<const double> f, std::size_t center, std::size_t half,
                    double h) {
  if (half % 2 != 0) throw std::invalid_argument("simpson_band: half must be even");
  if (half > center || center + half >= f.size()) {
    throw std::out_of_range("simpson_band: band exceeds samples");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < half; k += 2) {
    total += panel(f, center + k, h) + panel(f, center - k - 2, h);
  }
  return total;
}

std::vector<double> nested_simpson(std::span<const double> f, std::size_t center,
                                   std::size_t max_half, double h) {
  if (max_half % 2 != 0) throw std::invalid_argument("nested_simpson: half must be even");
  if (max_half > center || center + max_half >= f.size()) {
    throw std::out_of_range("nested_simpson: band exceeds samples");
  }
  std::vector<double> out;
  out.reserve(max_half / 2 + 1);
  double total = 0.0;
  out.push_back(total);
  for (std::size_t k = 0; k < max_half; k += 2) {
    total += panel(f, center + k, h) + panel(f, center - k - 2, h);
    out.push_back(total);
  }
  return out;
}

cplx filon_simpson(std::span<const cplx> f, double u_first, double h, double omega) {
  if (f.size() % 2 == 0) throw std::invalid_argument("filon_simpson: need an odd sample count");
  if (f.size() < 3) return {0.0, 0.0};
  const auto [i0, i1, i2] = filon_moments(omega * h);
  cplx total{0.0, 0.0};
  for (std::size_t k = 0; k + 2 < f.size(); k += 2) {
    const cplx f0 = f[k], f1 = f[k + 1], f2 = f[k + 2];
    const double mid = u_first + static_cast<double>(k + 1) * h;
    const cplx local = f1 * i0 + 0.5 * (f2 - f0) * i1 + 0.5 * (f2 - 2.0 * f1 + f0) * i2;
    total += std::polar(1.0, omega * mid) * local;
  }
  return h * total;
}

}  // namespace levy::quad
