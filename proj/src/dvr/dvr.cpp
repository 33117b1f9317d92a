#include "arraylight/dvr.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace arraylight {

Eigen::MatrixXd position_matrix(int n_fin, double length_scale) {
  if (n_fin < 0) throw std::invalid_argument("position_matrix: n_fin must be >= 0");
  if (!(length_scale >= 0.0)) throw std::invalid_argument("position_matrix: negative length scale");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_fin + 1, n_fin + 1);
  for (int n = 0; n < n_fin; ++n) {
    x(n, n + 1) = x(n + 1, n) = length_scale * std::sqrt(static_cast<double>(n + 1));
  }
  return x;
}

DvrGrid DvrGrid::build(const Eigen::MatrixXd& position) {
  if (position.rows() != position.cols() || position.rows() == 0) {
    throw std::invalid_argument("DvrGrid::build: position matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, position.cwiseAbs().maxCoeff());
  if ((position - position.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
    throw std::invalid_argument("DvrGrid::build: position matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(position);
  if (eig.info() != Eigen::Success) throw std::runtime_error("DvrGrid::build: eigen-decomposition failed");
  return DvrGrid(eig.eigenvalues(), eig.eigenvectors());
}

double DvrGrid::orthogonality_error() const {
  const Eigen::MatrixXd g = transform_.transpose() * transform_;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd DvrGrid::reconstruct() const {
  return transform_ * nodes_.asDiagonal() * transform_.transpose();
}

DenseMatrix matrix_elements(const DvrGrid& grid, const std::function<cplx(double)>& f, double offset,
                            int n_keep) {
  const Eigen::Index n = grid.size();
  const Eigen::Index keep = n_keep < 0 ? n : n_keep;
  if (keep > n) throw std::invalid_argument("matrix_elements: n_keep exceeds the grid size");
  Eigen::VectorXcd values(n);
  for (Eigen::Index b = 0; b < n; ++b) values(b) = f(offset + grid.nodes()(b));
  const Eigen::MatrixXd u = grid.transform().topRows(keep);
  return u.cast<cplx>() * values.asDiagonal() * u.transpose().cast<cplx>();
}

MotionalGrid::MotionalGrid() : nodes_{Vec3::Zero()}, weights_(Eigen::MatrixXd::Ones(1, 1)) {}

MotionalGrid::MotionalGrid(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  nodes_ = {Vec3::Zero()};
  weights_ = Eigen::MatrixXd::Ones(1, 1);
  for (const auto& axis : axes_) {
    if (axis.n_max < 0 || axis.n_fin < axis.n_max) {
      throw std::invalid_argument("MotionalGrid: need 0 <= n_max <= n_fin on every axis");
    }
    if (std::abs(axis.direction.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("MotionalGrid: axis direction must be a unit vector");
    }
    const DvrGrid grid = DvrGrid::build(position_matrix(axis.n_fin, axis.length_scale));
    const Eigen::MatrixXd u = grid.transform().topRows(axis.n_max + 1);
    const auto kept = u.rows();
    const auto n_new = grid.size();

    std::vector<Vec3> nodes;
    nodes.reserve(nodes_.size() * static_cast<std::size_t>(n_new));
    for (const auto& base : nodes_) {
      for (Eigen::Index b = 0; b < n_new; ++b) nodes.push_back(base + grid.nodes()(b) * axis.direction);
    }
    // Kronecker product: previous axes slow, this axis fast.
    Eigen::MatrixXd w(weights_.rows() * kept, weights_.cols() * n_new);
    for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
      for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
        w.block(i * kept, j * n_new, kept, n_new) = weights_(i, j) * u;
      }
    }
    nodes_ = std::move(nodes);
    weights_ = std::move(w);
    kept_.push_back(static_cast<int>(kept));
  }
}

std::vector<int> MotionalGrid::quanta(std::size_t v) const {
  std::vector<int> q(kept_.size(), 0);
  for (std::size_t a = kept_.size(); a-- > 0;) {
    q[a] = static_cast<int>(v % static_cast<std::size_t>(kept_[a]));
    v /= static_cast<std::size_t>(kept_[a]);
  }
  return q;
}

bool MotionalGrid::exactly_unitary() const {
  for (const auto& a : axes_) {
    if (a.n_fin != a.n_max) return false;
  }
  return true;
}

DenseMatrix MotionalGrid::matrix_elements(const std::function<cplx(const Vec3&)>& f) const {
  Eigen::VectorXcd values(static_cast<Eigen::Index>(nodes_.size()));
  for (std::size_t b = 0; b < nodes_.size(); ++b) values(static_cast<Eigen::Index>(b)) = f(nodes_[b]);
  const Eigen::MatrixXcd u = weights_.cast<cplx>();
  return u * values.asDiagonal() * u.transpose();
}

namespace {

// Q[(v,w), b] = U_vb U_wb  or the Kronecker-product row layout used below.
Eigen::MatrixXd outer_rows(const Eigen::MatrixXd& u) {
  const Eigen::Index nv = u.rows();
  Eigen::MatrixXd q(nv * nv, u.cols());
  for (Eigen::Index v = 0; v < nv; ++v) {
    for (Eigen::Index w = 0; w < nv; ++w) q.row(v * nv + w) = u.row(v).cwiseProduct(u.row(w));
  }
  return q;
}

Eigen::MatrixXcd node_pair_values(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                                  const std::function<cplx(const Vec3&)>& f) {
  Eigen::MatrixXcd values(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = f(a[i] - b[k]);
    }
  }
  return values;
}

}  // namespace

DenseMatrix MotionalGrid::pair_matrix_elements(const MotionalGrid& other,
                                               const std::function<cplx(const Vec3&)>& f) const {
  const Eigen::MatrixXcd values = node_pair_values(nodes_, other.nodes_, f);
  const Eigen::Index na = weights_.rows();
  const Eigen::Index nb = other.weights_.rows();
  const Eigen::Index ga = weights_.cols();
  const Eigen::Index gb = other.weights_.cols();
  // W[(v v'), (b b')] = U_vb U'_v'b'
  Eigen::MatrixXd w(na * nb, ga * gb);
  for (Eigen::Index v = 0; v < na; ++v) {
    for (Eigen::Index vp = 0; vp < nb; ++vp) {
      for (Eigen::Index b = 0; b < ga; ++b) {
        w.row(v * nb + vp).segment(b * gb, gb) = weights_(v, b) * other.weights_.row(vp);
      }
    }
  }
  Eigen::VectorXcd flat(ga * gb);
  for (Eigen::Index b = 0; b < ga; ++b) flat.segment(b * gb, gb) = values.row(b).transpose();
  const Eigen::MatrixXcd wc = w.cast<cplx>();
  return wc * flat.asDiagonal() * wc.transpose();
}

DenseMatrix MotionalGrid::sandwich_kernel(const MotionalGrid& other,
                                          const std::function<cplx(const Vec3&)>& f) const {
  const Eigen::MatrixXcd values = node_pair_values(nodes_, other.nodes_, f);
  const Eigen::MatrixXcd qa = outer_rows(weights_).cast<cplx>();
  const Eigen::MatrixXcd qb = outer_rows(other.weights_).cast<cplx>();
  return qa * values * qb.transpose();
}

}  // namespace arraylight
