#include "bergman/bounds.hpp"

#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

bool leq_with_tol(double lhs, double rhs, double tol_rel) {
  return lhs <= rhs + tol_rel * std::abs(rhs);
}

BoundReport make_report(std::string name, double lhs, double rhs,
                        double tol_rel, const BoundInputs& inputs) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.passed = leq_with_tol(lhs, rhs, tol_rel);
  r.inputs = inputs;
  return r;
}

BoundInputs inputs_for(const HPoint& z, int k, const ElementSet& elems,
                       double r_x) {
  BoundInputs in;
  in.z_x = z.x();
  in.z_y = z.y();
  in.k = k;
  in.r_x = r_x;
  in.r_x_is_upper_bound = true;
  in.truncation_word_length = elems.max_word_length();
  in.element_count = elems.size();
  return in;
}

}  // namespace

double constant_CX(int k, double r_x) {
  if (k <= 2)
    throw ValidationError("constant_CX requires k >= 3 (k-2 denominator)");
  if (!(r_x > 0.0)) throw ValidationError("constant_CX requires r_x > 0");
  const double ch4 = std::cosh(r_x / 4.0);
  const double ch2 = std::cosh(r_x / 2.0);
  const double sh4 = std::sinh(r_x / 4.0);
  const double first =
      (2.0 * k - 1.0) / (4.0 * M_PI) *
      (2.0 + 16.0 / std::pow(ch4, 2.0 * k - 4.0) +
       8.0 / std::pow(ch2, 2.0 * k - 3.0));
  const double second =
      (2.0 * k - 1.0) / (2.0 * M_PI * sh4 * sh4) *
      (1.0 / ((2.0 * k - 2.0) * std::pow(ch2, 2.0 * k - 3.0)) +
       1.0 / ((k - 2.0) * std::pow(ch2, 2.0 * k - 4.0)));
  return first + second;
}

double theorem1_rhs(int k, double c_x, double bkx) {
  if (!(bkx > 0.0))
    throw NumericalError("theorem1_rhs: kernel value must be positive");
  const double ratio = c_x / bkx;
  return k * k / M_PI * ratio * (4.0 * ratio + 5.0 + 1.0 / (2.0 * k)) +
         k / (2.0 * M_PI);
}

ChainReport kernel_upper_chain(const HPoint& z, int k, const ElementSet& elems,
                               double r_x, double tol_rel) {
  const KernelEvaluation ev = bergman_kernel_X(z, k, elems);

  double cosh_sum = 0.0;
  {
    // Independent route: per-element hyperbolic displacement rather than the
    // |Q| magnitudes inside the series.
    double comp = 0.0;
    for (const auto& e : elems.entries()) {
      const double d = hyp_distance(z, mobius_apply(e.g, z));
      const double t = std::pow(std::cosh(d / 2.0), -2.0 * k);
      const double s = cosh_sum + t;
      comp += (cosh_sum - s) + t;
      cosh_sum = s;
    }
    cosh_sum += comp;
  }

  ChainReport chain;
  chain.kernel_value = ev.value.real();
  chain.cosh_sum = cosh_sum;
  chain.c_x = constant_CX(k, r_x);

  const double middle = (2.0 * k - 1.0) / (4.0 * M_PI) * cosh_sum;
  const BoundInputs in = inputs_for(z, k, elems, r_x);
  chain.kernel_vs_cosh_sum =
      make_report("kernel<=cosh_sum", chain.kernel_value, middle, tol_rel, in);
  chain.cosh_sum_vs_cx =
      make_report("cosh_sum<=C_X", middle, chain.c_x, tol_rel, in);
  return chain;
}

BoundReport check_theorem1(const HPoint& z, int k, const ElementSet& elems,
                           double r_x, double tol_rel) {
  const double lhs = std::abs(ratio_ber_hyp(z, k, elems));
  const double bkx = bergman_kernel_X(z, k, elems).value.real();
  const double rhs = theorem1_rhs(k, constant_CX(k, r_x), bkx);
  return make_report("theorem1", lhs, rhs, tol_rel,
                     inputs_for(z, k, elems, r_x));
}

double corollary1_bound() { return 26.0 / M_PI; }

std::vector<Corollary1Row> corollary1_scan(const HPoint& z,
                                           const std::vector<int>& k_values,
                                           const ElementSetProvider& elems) {
  std::vector<Corollary1Row> rows;
  rows.reserve(k_values.size());
  const double bound = corollary1_bound();
  for (int k : k_values) {
    Corollary1Row row;
    row.k = k;
    row.value =
        std::abs(ratio_ber_hyp(z, k, elems(k))) / (static_cast<double>(k) * k);
    row.bound = bound;
    row.below = row.value < bound;
    rows.push_back(row);
  }
  return rows;
}

std::vector<AsymptoticRow> asymptotic_kernel_check(
    const HPoint& z, const std::vector<int>& k_values,
    const ElementSetProvider& elems) {
  std::vector<AsymptoticRow> rows;
  rows.reserve(k_values.size());
  for (int k : k_values) {
    const double bkx = bergman_kernel_X(z, k, elems(k)).value.real();
    rows.push_back({k, std::abs(2.0 * M_PI * bkx / k - 1.0)});
  }
  return rows;
}

}  // namespace bergman
