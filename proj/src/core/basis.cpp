#include "arraylight/basis.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace arraylight {

CompositeBasis::CompositeBasis(std::size_t n_atoms, std::size_t n_vib)
    : n_atoms_(n_atoms), n_vib_(n_vib), dim_(1) {
  if (n_atoms == 0) throw std::invalid_argument("CompositeBasis: n_atoms must be >= 1");
  if (n_vib == 0) throw std::invalid_argument("CompositeBasis: n_vib must be >= 1");
  if (n_vib > std::numeric_limits<std::size_t>::max() / 2) {
    throw std::overflow_error("CompositeBasis: local dimension overflows size_t");
  }
  const std::size_t local = 2 * n_vib;
  for (std::size_t j = 0; j < n_atoms; ++j) {
    if (dim_ > std::numeric_limits<std::size_t>::max() / local) {
      throw std::overflow_error("CompositeBasis: dimension (2*" + std::to_string(n_vib) + ")^" +
                                std::to_string(n_atoms) + " overflows size_t");
    }
    dim_ *= local;
  }
  strides_.resize(n_atoms);
  std::size_t s = 1;
  for (std::size_t j = n_atoms; j-- > 0;) {
    strides_[j] = s;
    s *= local;
  }
}

int CompositeBasis::excitations(std::size_t flat) const {
  int count = 0;
  for (std::size_t j = 0; j < n_atoms_; ++j) count += electronic(flat, j);
  return count;
}

std::size_t CompositeBasis::index(std::span<const int> electronic,
                                  std::span<const int> vibrational) const {
  if (electronic.size() != n_atoms_ || vibrational.size() != n_atoms_) {
    throw std::invalid_argument("CompositeBasis::index: label length does not match n_atoms");
  }
  std::size_t flat = 0;
  for (std::size_t j = 0; j < n_atoms_; ++j) {
    const int i = electronic[j];
    const int n = vibrational[j];
    if (i < 0 || i > 1 || n < 0 || static_cast<std::size_t>(n) >= n_vib_) {
      throw std::out_of_range("CompositeBasis::index: quantum number out of range");
    }
    flat += (static_cast<std::size_t>(i) * n_vib_ + static_cast<std::size_t>(n)) * strides_[j];
  }
  return flat;
}

CompositeBasis::Label CompositeBasis::unindex(std::size_t flat) const {
  if (flat >= dim_) throw std::out_of_range("CompositeBasis::unindex: index out of range");
  Label label;
  label.electronic.resize(n_atoms_);
  label.vibrational.resize(n_atoms_);
  for (std::size_t j = 0; j < n_atoms_; ++j) {
    label.electronic[j] = electronic(flat, j);
    label.vibrational[j] = vibrational(flat, j);
  }
  return label;
}

std::vector<std::size_t> CompositeBasis::ground_manifold() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < dim_; ++k) {
    if (excitations(k) == 0) out.push_back(k);
  }
  return out;
}

CompositeBasis build_basis(std::size_t n_atoms, std::size_t n_vib) {
  return CompositeBasis(n_atoms, n_vib);
}

}  // namespace arraylight
