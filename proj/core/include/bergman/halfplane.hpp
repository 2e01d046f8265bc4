#pragma once

#include <complex>

#include "bergman/errors.hpp"

namespace bergman {

using Complex = std::complex<double>;

// Default tolerances for the half-plane primitives. The determinant check is
// scaled by the squared Frobenius norm: for a product of many unit-determinant
// matrices the entries grow like e^{d/2} and ad - bc suffers cancellation of
// exactly that order, so a fixed absolute tolerance would spuriously reject
// valid far-out group elements.
inline constexpr double kDetTol = 1e-12;
inline constexpr double kSignEps = 1e-12;

/// A point z = x + iy of the upper half-plane, y > 0.
class HPoint {
 public:
  HPoint(double x, double y);

  double x() const { return x_; }
  double y() const { return y_; }
  Complex z() const { return Complex(x_, y_); }

 private:
  double x_;
  double y_;
};

/// A real 2x2 unit-determinant matrix (a b; c d) modulo sign, i.e. an element
/// of PSL(2,R). Construction renormalizes the determinant to 1 and fixes the
/// sign so that the first entry of (a, b, c, d) exceeding kSignEps in absolute
/// value is positive; this makes +g and -g indistinguishable, which is what
/// deterministic deduplication needs.
class MobiusElement {
 public:
  MobiusElement(double a, double b, double c, double d);

  static MobiusElement identity() { return MobiusElement(1.0, 0.0, 0.0, 1.0); }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  MobiusElement inverse() const { return MobiusElement(d_, -b_, -c_, a_); }

  /// Matrix product, renormalized and sign-canonicalized.
  MobiusElement operator*(const MobiusElement& rhs) const;

  /// Largest absolute entrywise difference after canonicalization.
  double entry_distance(const MobiusElement& rhs) const;

  bool is_identity(double tol = 1e-9) const;

 private:
  double a_, b_, c_, d_;
};

/// Action (az + b) / (cz + d) on the upper half-plane.
HPoint mobius_apply(const MobiusElement& g, const HPoint& z);

/// Automorphy denominator c * conj(z) + d.
Complex cocycle(const MobiusElement& g, const HPoint& z);

/// Hyperbolic distance, computed from cosh^2(d/2) = |z - conj(w)|^2 / (4yv).
double hyp_distance(const HPoint& z, const HPoint& w);

/// Density 1/y^2 of the hyperbolic area form with respect to dx dy.
double hyp_metric_density(const HPoint& z);

/// Displacement d(z, g z) of a point under a group element.
double displacement(const MobiusElement& g, const HPoint& z);

}  // namespace bergman
