#include "bergman/kernel.hpp"

#include <cmath>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexSum {
 public:
  void add(Complex v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  Complex value() const { return Complex(re_.value(), im_.value()); }

 private:
  CompensatedSum re_, im_;
};

Complex ipow(Complex base, int n) {
  Complex acc(1.0, 0.0);
  Complex p = base;
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) acc *= p;
    if (e > 1) p *= p;
  }
  return acc;
}

// Integer power of a complex number; switches to the exp/log form for large
// exponents where repeated squaring would overflow intermediate magnitudes.
Complex cpow_int(Complex base, int n) {
  if (n < 128) return ipow(base, n);
  return std::exp(static_cast<double>(n) * std::log(base));
}

void validate_series_args(int k, const ElementSet& elems) {
  if (k < 3)
    throw ValidationError("kernel series require k >= 3 (got " +
                          std::to_string(k) + ")");
  if (!elems.has_identity())
    throw ValidationError("element set does not contain the identity");
}

struct SeriesSums {
  Complex B{};
  Complex dz{};
  Complex dzbar{};
  Complex dzdzbar{};
  double abs_sum = 0.0;
  std::vector<double> shell_abs;
  int max_word_length = 0;
};

// One pass over the set evaluating the kernel series and, optionally, its
// three derivative series. Per element everything reduces to powers of
//   Q = c |z|^2 + d z - a zbar - b  =  (z - g zbar)(c zbar + d),
// with |Q| = 2y cosh(d_H(z, gz)/2):
//   B term       = (-1)^k Q^{-2k}
//   dz term      = -2k (-1)^k (c zbar + d) Q^{-(2k+1)}
//   dzbar term   = -2k (-1)^k (c z + d) Qbar^{-(2k+1)}
//   dzdzbar term = (-1)^k [ -2k(2k+1) Qbar^{-(2k+2)} + 4 c k^2 Qbar^{-(2k+1)} ]
SeriesSums accumulate_series(const HPoint& z, int k, const ElementSet& elems,
                             bool want_derivatives) {
  const Complex zc = z.z();
  const Complex zbar = std::conj(zc);
  const double zz = std::norm(zc);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double two_k = 2.0 * k;

  ComplexSum b_sum, dz_sum, dzbar_sum, dzdzbar_sum;
  CompensatedSum abs_sum;

  SeriesSums out;
  out.max_word_length = elems.max_word_length();
  out.shell_abs.assign(static_cast<std::size_t>(out.max_word_length) + 1, 0.0);
  std::vector<CompensatedSum> shell(out.shell_abs.size());

  for (const ElementSet::Entry& e : elems.entries()) {
    const MobiusElement& g = e.g;
    const Complex q = g.c() * zz + g.d() * zc - g.a() * zbar - g.b();
    const Complex inv_q = 1.0 / q;
    const Complex p2k = sign * cpow_int(inv_q, 2 * k);

    b_sum.add(p2k);
    const double mag = std::abs(p2k);
    abs_sum.add(mag);
    shell[e.word_length].add(mag);

    if (want_derivatives) {
      const Complex w2 = g.c() * zbar + g.d();
      dz_sum.add(-two_k * w2 * p2k * inv_q);
      const Complex inv_qb = std::conj(inv_q);
      const Complex p2kb = std::conj(p2k);
      dzbar_sum.add(-two_k * std::conj(w2) * p2kb * inv_qb);
      dzdzbar_sum.add(p2kb * (-two_k * (two_k + 1.0) * inv_qb * inv_qb +
                              4.0 * g.c() * static_cast<double>(k) *
                                  static_cast<double>(k) * inv_qb));
    }
  }

  out.B = b_sum.value();
  out.dz = dz_sum.value();
  out.dzbar = dzbar_sum.value();
  out.dzdzbar = dzdzbar_sum.value();
  out.abs_sum = abs_sum.value();
  for (std::size_t l = 0; l < shell.size(); ++l)
    out.shell_abs[l] = shell[l].value();
  return out;
}

// Heuristic geometric extrapolation of the remainder from the outermost two
// shells, clamped to the last shell magnitude.
double tail_from_shells(const std::vector<double>& shell_abs) {
  if (shell_abs.empty()) return 0.0;
  const double last = shell_abs.back();
  if (shell_abs.size() < 2) return last;
  const double prev = shell_abs[shell_abs.size() - 2];
  if (prev > last && last > 0.0)
    return std::min(last, last * last / (prev - last));
  return last;
}

KernelEvaluation finish_evaluation(const SeriesSums& s, int k,
                                   const ElementSet& elems, double scale) {
  KernelEvaluation ev;
  ev.value = scale * s.B;
  ev.k = k;
  ev.truncation_word_length = s.max_word_length;
  ev.element_count = elems.size();
  ev.abs_sum = scale * s.abs_sum;
  ev.shell_abs = s.shell_abs;
  for (double& v : ev.shell_abs) v *= scale;
  ev.last_shell_magnitude = ev.shell_abs.empty() ? 0.0 : ev.shell_abs.back();
  ev.tail_estimate = tail_from_shells(ev.shell_abs);
  return ev;
}

}  // namespace

KernelEvaluation series_B(const HPoint& z, int k, const ElementSet& elems) {
  validate_series_args(k, elems);
  const SeriesSums s = accumulate_series(z, k, elems, false);
  return finish_evaluation(s, k, elems, 1.0);
}

KernelEvaluation bergman_kernel_X(const HPoint& z, int k,
                                  const ElementSet& elems) {
  validate_series_args(k, elems);
  const SeriesSums s = accumulate_series(z, k, elems, false);
  const double prefactor =
      (2.0 * k - 1.0) / (4.0 * M_PI) * std::pow(2.0 * z.y(), 2.0 * k);
  return finish_evaluation(s, k, elems, prefactor);
}

DerivativeBundle series_derivatives(const HPoint& z, int k,
                                    const ElementSet& elems) {
  validate_series_args(k, elems);
  const SeriesSums s = accumulate_series(z, k, elems, true);
  DerivativeBundle out;
  out.dz = s.dz;
  out.dzbar = s.dzbar;
  out.dzdzbar = s.dzdzbar;
  out.k = k;
  out.truncation_word_length = s.max_word_length;
  return out;
}

double bergman_metric_density(const HPoint& z, int k, const ElementSet& elems) {
  validate_series_args(k, elems);
  const SeriesSums s = accumulate_series(z, k, elems, true);
  if (std::abs(s.B) < 1e-300)
    throw NumericalError("bergman_metric_density: kernel series is degenerate");
  // dz*dzbar/B^2 - dzdzbar/B is real for the full series; the residual
  // imaginary part is truncation/roundoff noise and is dropped.
  const Complex corr = s.dz * s.dzbar / (s.B * s.B) - s.dzdzbar / s.B;
  const double y = z.y();
  const double ratio = k / (2.0 * M_PI) + y * y / M_PI * corr.real();
  return ratio / (y * y);
}

double ratio_ber_hyp(const HPoint& z, int k, const ElementSet& elems) {
  return bergman_metric_density(z, k, elems) * z.y() * z.y();
}

}  // namespace bergman
