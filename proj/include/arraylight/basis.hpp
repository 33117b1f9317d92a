#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace arraylight {

/// Product basis |i_1 n_1 i_2 n_2 ...> of N two-level atoms, each with
/// n_vib vibrational levels (n = 0 .. n_vib-1).
///
/// Flat ordering: atom 0 is the slowest digit.  Within one atom the local
/// index is  l = i * n_vib + n, i.e. the electronic index (0 = g, 1 = e) is
/// slower than the vibrational one.  Every module uses this convention.
class CompositeBasis {
 public:
  /// Throws std::invalid_argument for zero counts and std::overflow_error if
  /// (2 n_vib)^n_atoms does not fit in std::size_t.
  CompositeBasis(std::size_t n_atoms, std::size_t n_vib);

  std::size_t n_atoms() const { return n_atoms_; }
  std::size_t n_vib() const { return n_vib_; }
  std::size_t n_max() const { return n_vib_ - 1; }
  std::size_t local_dim() const { return 2 * n_vib_; }
  std::size_t dim() const { return dim_; }

  /// Flat-index distance between neighbouring local states of `atom`.
  std::size_t stride(std::size_t atom) const { return strides_[atom]; }

  std::size_t local_index(std::size_t flat, std::size_t atom) const {
    return (flat / strides_[atom]) % local_dim();
  }
  int electronic(std::size_t flat, std::size_t atom) const {
    return static_cast<int>(local_index(flat, atom) / n_vib_);
  }
  int vibrational(std::size_t flat, std::size_t atom) const {
    return static_cast<int>(local_index(flat, atom) % n_vib_);
  }
  /// Number of electronically excited atoms in the basis state.
  int excitations(std::size_t flat) const;

  struct Label {
    std::vector<int> electronic;
    std::vector<int> vibrational;
  };

  std::size_t index(std::span<const int> electronic,
                    std::span<const int> vibrational) const;
  std::size_t index(const Label& label) const {
    return index(label.electronic, label.vibrational);
  }
  Label unindex(std::size_t flat) const;

  /// Flat indices of all states with every atom in |g>, in increasing order.
  std::vector<std::size_t> ground_manifold() const;

  friend bool operator==(const CompositeBasis& a, const CompositeBasis& b) {
    return a.n_atoms_ == b.n_atoms_ && a.n_vib_ == b.n_vib_;
  }

 private:
  std::size_t n_atoms_;
  std::size_t n_vib_;
  std::size_t dim_;
  std::vector<std::size_t> strides_;
};

CompositeBasis build_basis(std::size_t n_atoms, std::size_t n_vib);

}  // namespace arraylight
