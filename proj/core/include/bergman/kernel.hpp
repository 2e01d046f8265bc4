#pragma once

#include <vector>

#include "bergman/group.hpp"
#include "bergman/halfplane.hpp"

namespace bergman {

/// Value of a truncated automorphic series together with truncation metadata.
/// The tail estimate is a heuristic geometric extrapolation from the last two
/// word-length shells; it is reported but never added to the value.
struct KernelEvaluation {
  Complex value{};
  int k = 0;
  int truncation_word_length = 0;
  std::size_t element_count = 0;
  double abs_sum = 0.0;  ///< sum of |term| over the set
  std::vector<double> shell_abs;  ///< sum of |term| per word-length shell
  double last_shell_magnitude = 0.0;
  double tail_estimate = 0.0;
};

/// The three derivative series of the kernel: d/dz, d/dzbar and the mixed
/// second derivative.
struct DerivativeBundle {
  Complex dz{};
  Complex dzbar{};
  Complex dzdzbar{};
  int k = 0;
  int truncation_word_length = 0;
};

/// Truncated series B_k(z) = sum over the set of
/// i^{2k} / ((z - g zbar)^{2k} (c zbar + d)^{2k}), where g acts on the
/// conjugate point with the same matrix entries; the identity term is
/// (2y)^{-2k}. Summed shell by shell in canonical order with compensated
/// accumulation. Requires k >= 3 and the identity in the set.
KernelEvaluation series_B(const HPoint& z, int k, const ElementSet& elems);

/// Bergman kernel B_k^X(z) = (2k-1)/(4 pi) * (2y)^{2k} * B_k(z); real and
/// positive up to truncation roundoff.
KernelEvaluation bergman_kernel_X(const HPoint& z, int k,
                                  const ElementSet& elems);

/// dz   = -sum 2k i^{2k} / ((z - g zbar)^{2k+1} (c zbar + d)^{2k})
/// dzbar= -sum 2k i^{2k} / ((zbar - g z)^{2k+1} (c z + d)^{2k})
/// dzdzbar = -sum 2k(2k+1) i^{2k} / ((zbar - g z)^{2k+2} (c z + d)^{2k+2})
///         +  sum 4 c k^2 i^{2k} / ((zbar - g z)^{2k+1} (c z + d)^{2k+1})
DerivativeBundle series_derivatives(const HPoint& z, int k,
                                    const ElementSet& elems);

/// Density of the weight-k Bergman metric with respect to dx dy:
///   [ k/(2 pi) + (y^2/pi) ( dz*dzbar / B^2 - dzdzbar / B ) ] / y^2.
/// Zero for the identity-only set (the log-kernel is constant).
double bergman_metric_density(const HPoint& z, int k, const ElementSet& elems);

/// Coefficient ratio of the Bergman and hyperbolic (1,1)-densities,
/// bergman_metric_density * y^2.
double ratio_ber_hyp(const HPoint& z, int k, const ElementSet& elems);

}  // namespace bergman
