#include "bergman/grassmann.hpp"

#include <cmath>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {

GrassmannDims::GrassmannDims(int genus_, int k_, int d_)
    : genus(genus_), k(k_), d(d_) {
  if (genus < 2) throw ValidationError("GrassmannDims: genus must be >= 2");
  if (k < 2) throw ValidationError("GrassmannDims: k must be >= 2");
  if (d < 1) throw ValidationError("GrassmannDims: d must be >= 1");
  n_k = (2 * k - 1) * (genus - 1);
  r_k = n_k - d;
  if (2 * (k - 1) * (genus - 1) <= d)
    throw ValidationError(
        "GrassmannDims: dimension condition 2(k-1)(g-1) > d fails at k = " +
        std::to_string(k) + ", d = " + std::to_string(d) +
        " (r_k = " + std::to_string(r_k) + ")");
}

ChartMatrix::ChartMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.cols() < 1)
    throw ValidationError("ChartMatrix: matrix must be nonempty");
}

ChartMatrix::ChartMatrix(Eigen::MatrixXcd m, const GrassmannDims& dims)
    : m_(std::move(m)), dims_(dims) {
  if (m_.rows() != dims.n_k - dims.r_k || m_.cols() != dims.r_k)
    throw ValidationError(
        "ChartMatrix: shape " + std::to_string(m_.rows()) + "x" +
        std::to_string(m_.cols()) + " does not match dims (n-r)xr = " +
        std::to_string(dims.n_k - dims.r_k) + "x" + std::to_string(dims.r_k));
}

Eigen::MatrixXcd ChartMatrix::frame() const {
  Eigen::MatrixXcd f(ambient_dim(), subspace_dim());
  f.topRows(subspace_dim()) =
      Eigen::MatrixXcd::Identity(subspace_dim(), subspace_dim());
  f.bottomRows(chart_rows()) = m_;
  return f;
}

double fs_norm_sq(const ChartMatrix& chart, const Eigen::VectorXcd& s) {
  if (s.size() != chart.subspace_dim())
    throw ValidationError("fs_norm_sq: vector length " +
                          std::to_string(s.size()) + " does not match r = " +
                          std::to_string(chart.subspace_dim()));
  // s^*(I + M^*M)s = |s|^2 + |Ms|^2, manifestly real and nonnegative.
  return s.squaredNorm() + (chart.entries() * s).squaredNorm();
}

double fs_log_det(const ChartMatrix& chart) {
  const Eigen::MatrixXcd& m = chart.entries();
  const Eigen::MatrixXcd gram =
      Eigen::MatrixXcd::Identity(m.cols(), m.cols()) + m.adjoint() * m;
  const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    acc += std::log(llt.matrixL()(i, i).real());
  return std::max(0.0, 2.0 * acc);
}

namespace {

double perturbed_log_det(const ChartMatrix& chart, int row_i, int col_i,
                         Complex delta_i, int row_j, int col_j,
                         Complex delta_j) {
  Eigen::MatrixXcd m = chart.entries();
  m(row_i, col_i) += delta_i;
  m(row_j, col_j) += delta_j;
  return fs_log_det(ChartMatrix(std::move(m)));
}

// Mixed second derivative d^2 f / (du dv) of the log-det along two real
// coordinate directions (du, dv are either the real or imaginary unit of an
// entry), via the 4-point cross stencil.
double mixed_second(const ChartMatrix& chart, int ri, int ci, Complex ui,
                    int rj, int cj, Complex uj, double h) {
  const double fpp = perturbed_log_det(chart, ri, ci, h * ui, rj, cj, h * uj);
  const double fpm = perturbed_log_det(chart, ri, ci, h * ui, rj, cj, -h * uj);
  const double fmp = perturbed_log_det(chart, ri, ci, -h * ui, rj, cj, h * uj);
  const double fmm = perturbed_log_det(chart, ri, ci, -h * ui, rj, cj, -h * uj);
  return (fpp - fpm - fmp + fmm) / (4.0 * h * h);
}

double pure_second(const ChartMatrix& chart, int ri, int ci, Complex ui,
                   double h, double f0) {
  const double fp = perturbed_log_det(chart, ri, ci, h * ui, ri, ci, 0.0);
  const double fm = perturbed_log_det(chart, ri, ci, -h * ui, ri, ci, 0.0);
  return (fp - 2.0 * f0 + fm) / (h * h);
}

// The Wirtinger mixed derivative from real second derivatives:
//   d^2/(dm_i dmbar_j) = 1/4 [ f_{a_i a_j} + f_{b_i b_j}
//                              + i (f_{a_i b_j} - f_{b_i a_j}) ].
Complex wirtinger_fd(const ChartMatrix& chart, int i, int j, double h) {
  const int r = chart.subspace_dim();
  const int ri = i / r, ci = i % r;
  const int rj = j / r, cj = j % r;
  const Complex one(1.0, 0.0), imag(0.0, 1.0);
  if (i == j) {
    const double f0 = fs_log_det(chart);
    const double faa = pure_second(chart, ri, ci, one, h, f0);
    const double fbb = pure_second(chart, ri, ci, imag, h, f0);
    return Complex(0.25 * (faa + fbb), 0.0);
  }
  const double faa = mixed_second(chart, ri, ci, one, rj, cj, one, h);
  const double fbb = mixed_second(chart, ri, ci, imag, rj, cj, imag, h);
  const double fab = mixed_second(chart, ri, ci, one, rj, cj, imag, h);
  const double fba = mixed_second(chart, ri, ci, imag, rj, cj, one, h);
  return 0.25 * Complex(faa + fbb, fab - fba);
}

}  // namespace

Complex fs_form_fd(const ChartMatrix& chart, int i, int j, double step) {
  const int entries = chart.chart_rows() * chart.subspace_dim();
  if (i < 0 || j < 0 || i >= entries || j >= entries)
    throw ValidationError("fs_form_fd: entry index out of range");
  const double scale = chart.entries().cwiseAbs().maxCoeff();
  if (scale > kFsEntryScaleLimit)
    throw NumericalError(
        "fs_form_fd: step underflow, chart entries exceed 1e8");
  const double h = step * std::max(1.0, scale);
  // One Richardson refinement: D = (4 D(h/2) - D(h)) / 3.
  const Complex coarse = wirtinger_fd(chart, i, j, h);
  const Complex fine = wirtinger_fd(chart, i, j, 0.5 * h);
  const Complex second = (4.0 * fine - coarse) / 3.0;
  return second / (2.0 * M_PI);
}

Eigen::MatrixXcd fs_form_matrix(const ChartMatrix& chart, double step) {
  const int n = chart.chart_rows() * chart.subspace_dim();
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = fs_form_fd(chart, i, i, step);
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = fs_form_fd(chart, i, j, step);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

}  // namespace bergman
