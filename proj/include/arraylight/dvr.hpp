#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "arraylight/types.hpp"

namespace arraylight {

/// Truncated harmonic-oscillator position matrix on levels 0..n_fin:
/// <n|x|n+1> = length_scale * sqrt(n+1), zero elsewhere.
Eigen::MatrixXd position_matrix(int n_fin, double length_scale);

/// Discrete-variable grid: eigenpairs of a truncated position matrix,
///   x U = U diag(nodes),   U orthogonal, nodes ascending.
class DvrGrid {
 public:
  /// Throws std::invalid_argument for non-square or non-symmetric input.
  static DvrGrid build(const Eigen::MatrixXd& position);

  int n_fin() const { return static_cast<int>(nodes_.size()) - 1; }
  Eigen::Index size() const { return nodes_.size(); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::MatrixXd& transform() const { return transform_; }

  double orthogonality_error() const;
  /// U diag(nodes) U^T; reproduces the input position matrix.
  Eigen::MatrixXd reconstruct() const;

 private:
  DvrGrid(Eigen::VectorXd nodes, Eigen::MatrixXd transform)
      : nodes_(std::move(nodes)), transform_(std::move(transform)) {}
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd transform_;
};

/// <n|F(offset + x)|n'> ~= sum_b U_nb F(offset + x_b) U_n'b, for n, n' < n_keep
/// (n_keep < 0 keeps the full grid).  Exactly unitary for unimodular F when
/// n_keep equals the grid size.
DenseMatrix matrix_elements(const DvrGrid& grid, const std::function<cplx(double)>& f,
                            double offset = 0.0, int n_keep = -1);

/// One trap axis of an atom: direction (unit), oscillator length in 1/k0
/// units (= eta), kept levels 0..n_max and DVR cutoff n_fin >= n_max.
struct AxisSpec {
  Vec3 direction = Vec3::UnitX();
  double length_scale = 0.0;
  int n_max = 0;
  int n_fin = 0;
};

/// Tensor-product DVR over an atom's trap axes.  The vibrational index runs
/// over the product of kept levels with the first axis slowest; nodes are
/// displacement vectors.  weights() holds the kept rows of U (n_vib x n_nodes).
/// A default-constructed grid is a pinned atom: one level, one node at 0.
class MotionalGrid {
 public:
  MotionalGrid();
  explicit MotionalGrid(std::vector<AxisSpec> axes);

  std::size_t n_vib() const { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t n_nodes() const { return nodes_.size(); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const std::vector<AxisSpec>& axes() const { return axes_; }
  /// Quantum numbers per axis of vibrational index v.
  std::vector<int> quanta(std::size_t v) const;
  /// True when every axis has n_fin == n_max (unitary phase operators).
  bool exactly_unitary() const;

  /// <v|F(r)|v'> for a function of this atom's displacement.
  DenseMatrix matrix_elements(const std::function<cplx(const Vec3&)>& f) const;

  /// Ordinary two-atom operator F(r - r') with r on this atom and r' on
  /// `other`: rows/cols indexed v * other.n_vib() + v'.
  DenseMatrix pair_matrix_elements(const MotionalGrid& other,
                                   const std::function<cplx(const Vec3&)>& f) const;

  /// Left/right action of F(r - r') with r acting on rho from the left and r'
  /// from the right:
  ///   sum_{b b'} F(r_b - r'_b') P_b rho P'_b'  =  sum  K[(v,w),(v',w')] |v><w| rho |v'><w'|
  /// Returned K has rows (v * n_vib + w) and cols (v' * other.n_vib + w').
  DenseMatrix sandwich_kernel(const MotionalGrid& other,
                              const std::function<cplx(const Vec3&)>& f) const;

 private:
  std::vector<AxisSpec> axes_;
  std::vector<Vec3> nodes_;
  Eigen::MatrixXd weights_;
  std::vector<int> kept_;  // kept levels per axis
};

}  // namespace arraylight
