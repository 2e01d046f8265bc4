#include "bergman/halfplane.hpp"

#include <algorithm>
#include <cmath>

namespace bergman {

HPoint::HPoint(double x, double y) : x_(x), y_(y) {
  if (!(std::isfinite(x) && std::isfinite(y)))
    throw ValidationError("HPoint: coordinates must be finite");
  if (!(y > 0.0)) throw ValidationError("HPoint: y must be positive");
}

MobiusElement::MobiusElement(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d) {
  const double det = a * d - b * c;
  const double frob2 = a * a + b * b + c * c + d * d;
  if (!std::isfinite(det) || det <= 0.0 ||
      std::abs(det - 1.0) > kDetTol * std::max(1.0, frob2)) {
    throw ValidationError("MobiusElement: determinant must be 1 (got " +
                          std::to_string(det) + ")");
  }
  // Entries are kept exactly as given: rescaling by the computed 1/sqrt(det)
  // would inject the determinant's cancellation error (~scale^2 ulp) into
  // every entry and push same-element representations apart.
  // Canonical PSL(2,R) sign.
  const double entries[4] = {a_, b_, c_, d_};
  for (double e : entries) {
    if (std::abs(e) > kSignEps) {
      if (e < 0.0) {
        a_ = -a_;
        b_ = -b_;
        c_ = -c_;
        d_ = -d_;
      }
      break;
    }
  }
}

MobiusElement MobiusElement::operator*(const MobiusElement& rhs) const {
  return MobiusElement(a_ * rhs.a_ + b_ * rhs.c_, a_ * rhs.b_ + b_ * rhs.d_,
                       c_ * rhs.a_ + d_ * rhs.c_, c_ * rhs.b_ + d_ * rhs.d_);
}

double MobiusElement::entry_distance(const MobiusElement& rhs) const {
  return std::max({std::abs(a_ - rhs.a_), std::abs(b_ - rhs.b_),
                   std::abs(c_ - rhs.c_), std::abs(d_ - rhs.d_)});
}

bool MobiusElement::is_identity(double tol) const {
  return entry_distance(identity()) <= tol;
}

HPoint mobius_apply(const MobiusElement& g, const HPoint& z) {
  const Complex w =
      (g.a() * z.z() + g.b()) / (g.c() * z.z() + g.d());
  return HPoint(w.real(), w.imag());
}

Complex cocycle(const MobiusElement& g, const HPoint& z) {
  return g.c() * std::conj(z.z()) + g.d();
}

double hyp_distance(const HPoint& z, const HPoint& w) {
  const double dx = z.x() - w.x();
  const double sy = z.y() + w.y();
  const double num = std::hypot(dx, sy);
  const double arg = num / (2.0 * std::sqrt(z.y() * w.y()));
  // arg >= 1 in exact arithmetic; guard against roundoff at z == w.
  return 2.0 * std::acosh(std::max(arg, 1.0));
}

double hyp_metric_density(const HPoint& z) { return 1.0 / (z.y() * z.y()); }

double displacement(const MobiusElement& g, const HPoint& z) {
  return hyp_distance(z, mobius_apply(g, z));
}

}  // namespace bergman
