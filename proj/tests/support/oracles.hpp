#pragma once

// Test-side oracles: finite differencing and random input generation. These
// are deliberately independent of the library's internal evaluation paths.

#include <complex>
#include <functional>
#include <random>

#include "bergman/halfplane.hpp"

namespace testsupport {

using bergman::Complex;
using bergman::HPoint;
using RealFn = std::function<double(const HPoint&)>;
using ComplexFn = std::function<Complex(const HPoint&)>;

// Wirtinger d/dz = (d/dx - i d/dy)/2 by central differences with one
// Richardson refinement (step h, h/2).
inline Complex fd_dz(const ComplexFn& f, const HPoint& z, double h) {
  auto once = [&](double step) {
    const Complex fx = (f(HPoint(z.x() + step, z.y())) -
                        f(HPoint(z.x() - step, z.y()))) /
                       (2.0 * step);
    const Complex fy = (f(HPoint(z.x(), z.y() + step)) -
                        f(HPoint(z.x(), z.y() - step))) /
                       (2.0 * step);
    return 0.5 * (fx - Complex(0.0, 1.0) * fy);
  };
  const Complex coarse = once(h);
  const Complex fine = once(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

inline Complex fd_dzbar(const ComplexFn& f, const HPoint& z, double h) {
  auto once = [&](double step) {
    const Complex fx = (f(HPoint(z.x() + step, z.y())) -
                        f(HPoint(z.x() - step, z.y()))) /
                       (2.0 * step);
    const Complex fy = (f(HPoint(z.x(), z.y() + step)) -
                        f(HPoint(z.x(), z.y() - step))) /
                       (2.0 * step);
    return 0.5 * (fx + Complex(0.0, 1.0) * fy);
  };
  const Complex coarse = once(h);
  const Complex fine = once(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

// d^2/(dz dzbar) = Laplacian/4 via the 5-point stencil plus Richardson.
// The step must sit well above the second-derivative roundoff floor
// eps/h^2; with Richardson the truncation is O(h^4), so h ~ 1e-3 reaches
// ~1e-9 relative accuracy where h = 1e-5 would bottom out near 1e-6.
inline Complex fd_dzdzbar(const ComplexFn& f, const HPoint& z, double h) {
  const Complex f0 = f(z);
  auto once = [&](double step) {
    const Complex lap_x = f(HPoint(z.x() + step, z.y())) - 2.0 * f0 +
                          f(HPoint(z.x() - step, z.y()));
    const Complex lap_y = f(HPoint(z.x(), z.y() + step)) - 2.0 * f0 +
                          f(HPoint(z.x(), z.y() - step));
    return (lap_x + lap_y) / (step * step) / 4.0;
  };
  const Complex coarse = once(h);
  const Complex fine = once(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

// Fourth-order 5-point second-derivative stencils for d^2/(dz dzbar) =
// Laplacian/4; noise-resistant enough to resolve near-cancelling metric
// densities (relative error ~1e-6 at density scale 1e-4).
inline Complex fd_dzdzbar_4th(const ComplexFn& f, const HPoint& z, double h) {
  const Complex f0 = f(z);
  auto d2 = [&](bool along_x) {
    auto at = [&](double step) {
      return along_x ? f(HPoint(z.x() + step, z.y()))
                     : f(HPoint(z.x(), z.y() + step));
    };
    return (-at(2.0 * h) + 16.0 * at(h) - 30.0 * f0 + 16.0 * at(-h) -
            at(-2.0 * h)) /
           (12.0 * h * h);
  };
  return (d2(true) + d2(false)) / 4.0;
}

// Default oracle steps: first derivatives keep the 1e-5 convention; second
// derivatives need the larger step (see fd_dzdzbar).
inline double fd_step(const HPoint& z) {
  return 1e-5 * std::max(1.0, std::abs(z.z()));
}

inline double fd_step2(const HPoint& z) {
  return 1e-3 * std::max(1.0, std::abs(z.z()));
}

inline std::mt19937_64 rng(std::uint64_t seed = 0x5eed5eedULL) {
  return std::mt19937_64(seed);
}

inline HPoint random_hpoint(std::mt19937_64& gen, double x_half_width = 1.5,
                            double y_min = 0.4, double y_max = 2.5) {
  std::uniform_real_distribution<double> ux(-x_half_width, x_half_width);
  std::uniform_real_distribution<double> uy(y_min, y_max);
  return HPoint(ux(gen), uy(gen));
}

// Random element of SL(2,R): draw a, b, c and solve for d.
inline bergman::MobiusElement random_sl2(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double a = 0.0;
  do {
    a = u(gen);
  } while (std::abs(a) < 0.1);
  const double b = u(gen);
  const double c = u(gen);
  return bergman::MobiusElement(a, b, c, (1.0 + b * c) / a);
}

}  // namespace testsupport
