#pragma once

#include <optional>

#include <Eigen/Dense>

#include "bergman/halfplane.hpp"

namespace bergman {

/// Finite-difference step (relative to the entry scale) for the Fubini-Study
/// chart coefficients; one Richardson refinement brings the truncation error
/// to O(step^4).
inline constexpr double kFsFdStep = 5e-3;
/// Entries above this make the relative step lose all significance.
inline constexpr double kFsEntryScaleLimit = 1e8;

/// Dimension data for the Grassmannian embedding of the d-fold symmetric
/// product: n_k = (2k-1)(g-1) and r_k = n_k - d, valid when
/// 2(k-1)(g-1) > d.
struct GrassmannDims {
  int genus = 0;
  int k = 0;
  int d = 0;
  int n_k = 0;
  int r_k = 0;

  GrassmannDims(int genus, int k, int d);
};

/// Chart matrix M of a Grassmannian chart: the point is the column span of
/// the frame [Id_r; M], with M of shape (n-r) x r.
class ChartMatrix {
 public:
  explicit ChartMatrix(Eigen::MatrixXcd m);
  ChartMatrix(Eigen::MatrixXcd m, const GrassmannDims& dims);

  const Eigen::MatrixXcd& entries() const { return m_; }
  int chart_rows() const { return static_cast<int>(m_.rows()); }  // n - r
  int subspace_dim() const { return static_cast<int>(m_.cols()); }  // r
  int ambient_dim() const { return chart_rows() + subspace_dim(); }  // n
  const std::optional<GrassmannDims>& dims() const { return dims_; }

  /// The frame [Id_r; M], an n x r matrix whose columns span the point.
  Eigen::MatrixXcd frame() const;

 private:
  Eigen::MatrixXcd m_;
  std::optional<GrassmannDims> dims_;
};

/// Squared Hermitian norm s^* (Id + M^* M) s of a section coefficient vector.
double fs_norm_sq(const ChartMatrix& chart, const Eigen::VectorXcd& s);

/// log det(Id + M^* M) >= 0; the Fubini-Study potential of the chart.
double fs_log_det(const ChartMatrix& chart);

/// Coefficient (i, j) of the Fubini-Study Kaehler form in the chart,
/// (1/2 pi) d^2/(dm_i dmbar_j) of fs_log_det, by central finite differences
/// with one Richardson refinement. Entry indices are row-major over M.
Complex fs_form_fd(const ChartMatrix& chart, int i, int j,
                   double step = kFsFdStep);

/// Full Hermitian coefficient matrix of the form, (n-r)r x (n-r)r.
Eigen::MatrixXcd fs_form_matrix(const ChartMatrix& chart,
                                double step = kFsFdStep);

}  // namespace bergman
