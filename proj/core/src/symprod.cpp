#include "bergman/symprod.hpp"

#include <algorithm>
#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {

const char* const kSymdCaveat =
    "volume density uses the plain weight-k Bergman kernel in place of the "
    "divisor-twisted kernel; the substitution error decays like 1/k but is "
    "not quantified, so this value is an estimate, not a certified bound";

SymPoint::SymPoint(std::vector<HPoint> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw ValidationError("SymPoint: needs at least one point");
  std::sort(pts_.begin(), pts_.end(), [](const HPoint& a, const HPoint& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() < b.y();
  });
}

double symd_hyp_volume_density(const SymPoint& p) {
  double acc = 1.0;
  for (const HPoint& z : p.points()) acc *= 1.0 / (z.y() * z.y());
  return acc;
}

SymdVolumeEstimate symd_fs_volume_estimate(const SymPoint& p, int k,
                                           const ElementSet& elems,
                                           int genus) {
  GrassmannDims dims(genus, k, p.degree());  // validates 2(k-1)(g-1) > d
  (void)dims;
  double prod = 1.0;
  for (const HPoint& z : p.points())
    prod *= bergman_metric_density(z, k, elems) * z.y() * z.y();
  return {prod * symd_hyp_volume_density(p), kSymdCaveat};
}

Theorem2Bound theorem2_rhs(const SymPoint& p, int k, const ElementSet& elems,
                           double r_x, int genus) {
  GrassmannDims dims(genus, k, p.degree());
  (void)dims;
  const double c_x = constant_CX(k, r_x);
  double prod = 1.0;
  for (const HPoint& z : p.points()) {
    const double bkx = bergman_kernel_X(z, k, elems).value.real();
    prod *= theorem1_rhs(k, c_x, bkx);
  }
  return {prod, kSymdCaveat};
}

double corollary2_bound(int d) { return std::pow(corollary1_bound(), d); }

std::vector<Corollary2Row> corollary2_scan(const SymPoint& p,
                                           const std::vector<int>& k_values,
                                           const ElementSetProvider& elems,
                                           int genus) {
  std::vector<Corollary2Row> rows;
  rows.reserve(k_values.size());
  const double bound = corollary2_bound(p.degree());
  for (int k : k_values) {
    const ElementSet& set = elems(k);
    const SymdVolumeEstimate est = symd_fs_volume_estimate(p, k, set, genus);
    Corollary2Row row;
    row.k = k;
    row.value = std::abs(est.value / symd_hyp_volume_density(p)) /
                std::pow(static_cast<double>(k), 2.0 * p.degree());
    row.bound = bound;
    row.below = row.value < bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bergman
