#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "arraylight/basis.hpp"
#include "arraylight/types.hpp"

namespace arraylight {

/// Complex sparse operator on a composite space.  Stored CSR, entries sorted,
/// duplicates merged, no explicitly stored zeros.
class SparseOperator {
 public:
  using Storage = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

  struct Entry {
    std::size_t row;
    std::size_t col;
    cplx value;
  };

  SparseOperator() = default;
  explicit SparseOperator(std::size_t dim);
  explicit SparseOperator(Storage m);

  static SparseOperator identity(std::size_t dim);
  static SparseOperator from_entries(std::size_t dim, std::span<const Entry> entries);
  static SparseOperator from_dense(const DenseMatrix& m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(m_.nonZeros()); }
  const Storage& matrix() const { return m_; }

  std::vector<Entry> entries() const;
  SparseOperator adjoint() const;
  DenseMatrix to_dense() const;
  double hermiticity_error() const;

  SparseOperator& operator+=(const SparseOperator& other);
  SparseOperator& operator-=(const SparseOperator& other);
  SparseOperator& operator*=(cplx s);

  friend SparseOperator operator+(SparseOperator a, const SparseOperator& b) { return a += b; }
  friend SparseOperator operator-(SparseOperator a, const SparseOperator& b) { return a -= b; }
  friend SparseOperator operator*(cplx s, SparseOperator a) { return a *= s; }
  friend SparseOperator operator*(SparseOperator a, cplx s) { return a *= s; }
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

 private:
  void prune_zeros();
  Storage m_;
};

// Sparse-dense products.  All throw std::invalid_argument on dimension mismatch.
DenseMatrix apply_left(const SparseOperator& a, const DenseMatrix& rho);
DenseMatrix apply_right(const DenseMatrix& rho, const SparseOperator& a);
cplx trace_of_product(const SparseOperator& a, const DenseMatrix& rho);

/// Embed a single-atom operator (2 n_vib square, local ordering i*n_vib + n)
/// acting on `atom`; identity on every other atom.
SparseOperator lift_atom_operator(const CompositeBasis& basis, std::size_t atom,
                                  const DenseMatrix& local);

/// Embed a two-atom operator on atoms (a, b), a != b.  The local matrix has
/// dimension (2 n_vib)^2 with row/column index  l_a * (2 n_vib) + l_b.
SparseOperator lift_pair_operator(const CompositeBasis& basis, std::size_t a, std::size_t b,
                                  const DenseMatrix& local);

/// Single-atom building blocks in the local ordering.
namespace local {
DenseMatrix lowering(std::size_t n_vib);  ///< sigma^- = |g><e| (x) 1_vib
DenseMatrix raising(std::size_t n_vib);   ///< sigma^+ = |e><g| (x) 1_vib
DenseMatrix excited(std::size_t n_vib);   ///< e = |e><e| (x) 1_vib
/// electronic (2x2) (x) vibrational (n_vib x n_vib)
DenseMatrix product(const Eigen::Matrix2cd& electronic, const DenseMatrix& vibrational);
}  // namespace local

}  // namespace arraylight
