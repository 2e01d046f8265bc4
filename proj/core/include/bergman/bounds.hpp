#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bergman/group.hpp"
#include "bergman/halfplane.hpp"
#include "bergman/kernel.hpp"

namespace bergman {

/// Relative pass/fail tolerance on the right-hand side of a bound check.
inline constexpr double kBoundCheckRelTol = 1e-9;

/// Inputs a bound was evaluated at, kept for reporting.
struct BoundInputs {
  double z_x = 0.0;
  double z_y = 0.0;
  int k = 0;
  double r_x = 0.0;
  bool r_x_is_upper_bound = true;
  int truncation_word_length = 0;
  std::size_t element_count = 0;
};

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  ///< rhs - lhs
  bool passed = false;  ///< lhs <= rhs + tol_rel * |rhs|
  BoundInputs inputs;
};

/// The explicit kernel constant
///   C_X = (2k-1)/(4 pi) (2 + 16/cosh^{2k-4}(r/4) + 8/cosh^{2k-3}(r/2))
///       + (2k-1)/(2 pi sinh^2(r/4)) (1/((2k-2) cosh^{2k-3}(r/2))
///                                  + 1/((k-2) cosh^{2k-4}(r/2))).
/// Decreasing in r; tends to (2k-1)/(2 pi) as r grows. Requires k >= 3
/// (the k-2 denominator) and r > 0.
double constant_CX(int k, double r_x);

/// Right-hand side of the main metric estimate,
///   k^2/pi * (C/B) * (4C/B + 5 + 1/(2k)) + k/(2 pi).
double theorem1_rhs(int k, double c_x, double bkx);

/// The two-link kernel chain
///   B_k^X(z) <= (2k-1)/(4 pi) sum cosh^{-2k}(d(z, gz)/2) <= C_X,
/// with the middle sum evaluated through hyperbolic distances (an independent
/// route from the series magnitudes).
struct ChainReport {
  BoundReport kernel_vs_cosh_sum;
  BoundReport cosh_sum_vs_cx;
  double kernel_value = 0.0;
  double cosh_sum = 0.0;  ///< sum of cosh^{-2k}(d(z, gz)/2) over the set
  double c_x = 0.0;
};

ChainReport kernel_upper_chain(const HPoint& z, int k, const ElementSet& elems,
                               double r_x,
                               double tol_rel = kBoundCheckRelTol);

/// Checks |mu_ber/mu_hyp| <= theorem1_rhs at a point.
BoundReport check_theorem1(const HPoint& z, int k, const ElementSet& elems,
                           double r_x, double tol_rel = kBoundCheckRelTol);

using ElementSetProvider = std::function<const ElementSet&(int k)>;

/// Scaled metric ratios (1/k^2)|mu_ber/mu_hyp| against the limit bound 26/pi.
struct Corollary1Row {
  int k = 0;
  double value = 0.0;
  double bound = 0.0;
  bool below = false;
};

std::vector<Corollary1Row> corollary1_scan(const HPoint& z,
                                           const std::vector<int>& k_values,
                                           const ElementSetProvider& elems);

/// Deviations |2 pi B_k^X(z)/k - 1|; the identity term alone contributes
/// exactly 1/(2k).
struct AsymptoticRow {
  int k = 0;
  double deviation = 0.0;
};

std::vector<AsymptoticRow> asymptotic_kernel_check(
    const HPoint& z, const std::vector<int>& k_values,
    const ElementSetProvider& elems);

double corollary1_bound();  ///< 26/pi

}  // namespace bergman
