#include "arraylight/sparse_operator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace arraylight {
namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void require_square(const DenseMatrix& m, const char* where) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(where) + ": matrix not square");
}

}  // namespace

SparseOperator::SparseOperator(std::size_t dim)
    : m_(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) {}

SparseOperator::SparseOperator(Storage m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("SparseOperator: matrix not square");
  prune_zeros();
}

SparseOperator SparseOperator::identity(std::size_t dim) {
  Storage m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setIdentity();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::from_entries(std::size_t dim, std::span<const Entry> entries) {
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row >= dim || e.col >= dim) {
      throw std::out_of_range("SparseOperator::from_entries: entry outside dimension");
    }
    triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  }
  Storage m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::from_dense(const DenseMatrix& d) {
  require_square(d, "SparseOperator::from_dense");
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
      if (d(r, c) != cplx(0.0)) triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), d(r, c));
    }
  }
  Storage m(d.rows(), d.cols());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(m));
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
  std::vector<Entry> out;
  out.reserve(nonzeros());
  for (int r = 0; r < m_.outerSize(); ++r) {
    for (Storage::InnerIterator it(m_, r); it; ++it) {
      out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value()});
    }
  }
  return out;
}

SparseOperator SparseOperator::adjoint() const {
  Storage a = m_.adjoint();
  return SparseOperator(std::move(a));
}

DenseMatrix SparseOperator::to_dense() const { return DenseMatrix(m_); }

double SparseOperator::hermiticity_error() const {
  Storage diff = m_ - Storage(m_.adjoint());
  double worst = 0.0;
  for (int r = 0; r < diff.outerSize(); ++r) {
    for (Storage::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SparseOperator& SparseOperator::operator+=(const SparseOperator& other) {
  require_same_dim(dim(), other.dim(), "SparseOperator::operator+");
  m_ += other.m_;
  prune_zeros();
  return *this;
}

SparseOperator& SparseOperator::operator-=(const SparseOperator& other) {
  require_same_dim(dim(), other.dim(), "SparseOperator::operator-");
  m_ -= other.m_;
  prune_zeros();
  return *this;
}

SparseOperator& SparseOperator::operator*=(cplx s) {
  m_ *= s;
  prune_zeros();
  return *this;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a.dim(), b.dim(), "SparseOperator::operator*");
  SparseOperator::Storage p = a.m_ * b.m_;
  return SparseOperator(std::move(p));
}

void SparseOperator::prune_zeros() {
  m_.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
  m_.makeCompressed();
}

DenseMatrix apply_left(const SparseOperator& a, const DenseMatrix& rho) {
  require_same_dim(a.dim(), static_cast<std::size_t>(rho.rows()), "apply_left");
  return a.matrix() * rho;
}

DenseMatrix apply_right(const DenseMatrix& rho, const SparseOperator& a) {
  require_same_dim(a.dim(), static_cast<std::size_t>(rho.cols()), "apply_right");
  return rho * a.matrix();
}

cplx trace_of_product(const SparseOperator& a, const DenseMatrix& rho) {
  require_same_dim(a.dim(), static_cast<std::size_t>(rho.rows()), "trace_of_product");
  require_square(rho, "trace_of_product");
  // Tr(A rho) = sum_{k,l} A_kl rho_lk
  cplx sum = 0.0;
  const auto& m = a.matrix();
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::Storage::InnerIterator it(m, k); it; ++it) sum += it.value() * rho(it.col(), k);
  }
  return sum;
}

SparseOperator lift_atom_operator(const CompositeBasis& basis, std::size_t atom,
                                  const DenseMatrix& local) {
  if (atom >= basis.n_atoms()) throw std::out_of_range("lift_atom_operator: atom index out of range");
  const auto ld = static_cast<Eigen::Index>(basis.local_dim());
  if (local.rows() != ld || local.cols() != ld) {
    throw std::invalid_argument("lift_atom_operator: local matrix must be 2*n_vib square");
  }
  const std::size_t s = basis.stride(atom);
  std::vector<SparseOperator::Entry> entries;
  for (std::size_t col = 0; col < basis.dim(); ++col) {
    const std::size_t lc = basis.local_index(col, atom);
    const std::size_t base = col - lc * s;
    for (Eigen::Index lr = 0; lr < ld; ++lr) {
      const cplx v = local(lr, static_cast<Eigen::Index>(lc));
      if (v != cplx(0.0)) entries.push_back({base + static_cast<std::size_t>(lr) * s, col, v});
    }
  }
  return SparseOperator::from_entries(basis.dim(), entries);
}

SparseOperator lift_pair_operator(const CompositeBasis& basis, std::size_t a, std::size_t b,
                                  const DenseMatrix& local) {
  if (a >= basis.n_atoms() || b >= basis.n_atoms()) {
    throw std::out_of_range("lift_pair_operator: atom index out of range");
  }
  if (a == b) throw std::invalid_argument("lift_pair_operator: atoms must differ");
  const std::size_t ld = basis.local_dim();
  const auto pd = static_cast<Eigen::Index>(ld * ld);
  if (local.rows() != pd || local.cols() != pd) {
    throw std::invalid_argument("lift_pair_operator: local matrix must be (2*n_vib)^2 square");
  }
  const std::size_t sa = basis.stride(a);
  const std::size_t sb = basis.stride(b);
  std::vector<SparseOperator::Entry> entries;
  for (std::size_t col = 0; col < basis.dim(); ++col) {
    const std::size_t la = basis.local_index(col, a);
    const std::size_t lb = basis.local_index(col, b);
    const std::size_t base = col - la * sa - lb * sb;
    const auto pc = static_cast<Eigen::Index>(la * ld + lb);
    for (Eigen::Index pr = 0; pr < pd; ++pr) {
      const cplx v = local(pr, pc);
      if (v == cplx(0.0)) continue;
      const std::size_t ra = static_cast<std::size_t>(pr) / ld;
      const std::size_t rb = static_cast<std::size_t>(pr) % ld;
      entries.push_back({base + ra * sa + rb * sb, col, v});
    }
  }
  return SparseOperator::from_entries(basis.dim(), entries);
}

namespace local {

DenseMatrix product(const Eigen::Matrix2cd& electronic, const DenseMatrix& vibrational) {
  const Eigen::Index nv = vibrational.rows();
  DenseMatrix out = DenseMatrix::Zero(2 * nv, 2 * nv);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      if (electronic(i, k) != cplx(0.0)) out.block(i * nv, k * nv, nv, nv) = electronic(i, k) * vibrational;
    }
  }
  return out;
}

DenseMatrix lowering(std::size_t n_vib) {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(0, 1) = 1.0;
  return product(s, DenseMatrix::Identity(static_cast<Eigen::Index>(n_vib), static_cast<Eigen::Index>(n_vib)));
}

DenseMatrix raising(std::size_t n_vib) { return lowering(n_vib).adjoint(); }

DenseMatrix excited(std::size_t n_vib) {
  Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
  e(1, 1) = 1.0;
  return product(e, DenseMatrix::Identity(static_cast<Eigen::Index>(n_vib), static_cast<Eigen::Index>(n_vib)));
}

}  // namespace local

}  // namespace arraylight
