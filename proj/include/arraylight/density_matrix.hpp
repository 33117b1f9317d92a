#pragma once

#include <span>
#include <vector>

#include "arraylight/basis.hpp"
#include "arraylight/types.hpp"

namespace arraylight {

/// Dense density matrix on a composite basis.  Hermiticity and unit trace are
/// maintained by the solvers; positivity is only monitored.
class DensityMatrix {
 public:
  explicit DensityMatrix(DenseMatrix data);

  /// All atoms in |g>; each atom's motional state is diagonal with the given
  /// populations (length n_vib, default: vibrational ground state).
  static DensityMatrix ground(const CompositeBasis& basis,
                              std::span<const double> vib_populations = {});
  /// Thermal motional populations p_n ~ (nbar/(1+nbar))^n, renormalised on the
  /// truncated ladder.
  static std::vector<double> thermal_populations(std::size_t n_vib, double nbar);

  std::size_t dim() const { return static_cast<std::size_t>(data_.rows()); }
  const DenseMatrix& data() const { return data_; }
  DenseMatrix& data() { return data_; }

  cplx trace() const { return data_.trace(); }
  double hermiticity_error() const;
  /// Smallest real part on the diagonal (positivity monitor).
  double min_diagonal() const;

  void hermitize();
  void normalize();

  /// Hermitian within herm_tol, trace one within trace_tol, diagonal >= -diag_tol.
  bool is_valid(double herm_tol = 1e-12, double trace_tol = 1e-10, double diag_tol = 1e-9) const;

 private:
  DenseMatrix data_;
};

}  // namespace arraylight
