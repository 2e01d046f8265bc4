#pragma once

#include <string>
#include <vector>

#include "bergman/bounds.hpp"
#include "bergman/grassmann.hpp"
#include "bergman/group.hpp"
#include "bergman/halfplane.hpp"

namespace bergman {

/// Caveat attached to every symmetric-product volume output: the pullback
/// density is computed from the plain weight-k kernel, not the
/// divisor-twisted one, so it carries an unquantified error that vanishes
/// only as k grows.
extern const char* const kSymdCaveat;

/// A point of the d-fold symmetric product: an unordered multiset of d
/// half-plane points, held sorted by (x, y) for deterministic equality.
class SymPoint {
 public:
  explicit SymPoint(std::vector<HPoint> pts);

  int degree() const { return static_cast<int>(pts_.size()); }
  const std::vector<HPoint>& points() const { return pts_; }

 private:
  std::vector<HPoint> pts_;
};

/// Density prod 1/y_i^2 of the product hyperbolic volume form.
double symd_hyp_volume_density(const SymPoint& p);

struct SymdVolumeEstimate {
  double value = 0.0;
  std::string caveat;
};

/// Product of per-factor Bergman metric densities times the hyperbolic
/// volume density: an approximation of the Fubini-Study pullback volume
/// density, up to the substitution recorded in the caveat.
SymdVolumeEstimate symd_fs_volume_estimate(const SymPoint& p, int k,
                                           const ElementSet& elems, int genus);

struct Theorem2Bound {
  double value = 0.0;
  std::string caveat;
};

/// The computable product part of the volume bound,
/// prod_i theorem1_rhs(k, C_X, B_k^X(z_i)); the remaining o_z(k) term is
/// unquantified and only acknowledged through the caveat.
Theorem2Bound theorem2_rhs(const SymPoint& p, int k, const ElementSet& elems,
                           double r_x, int genus);

struct Corollary2Row {
  int k = 0;
  double value = 0.0;  ///< (1/k^{2d}) |fs estimate / hyp density|
  double bound = 0.0;  ///< (26/pi)^d
  bool below = false;
};

std::vector<Corollary2Row> corollary2_scan(const SymPoint& p,
                                           const std::vector<int>& k_values,
                                           const ElementSetProvider& elems,
                                           int genus);

double corollary2_bound(int d);  ///< (26/pi)^d

}  // namespace bergman
