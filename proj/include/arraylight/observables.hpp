#pragma once

#include <string>
#include <vector>

#include "arraylight/density_matrix.hpp"
#include "arraylight/model.hpp"
#include "arraylight/sparse_operator.hpp"

namespace arraylight {

/// Transmitted-field operator for the waveguide,
///   tau = 1 - (i/Omega) sum_j sigma_j^- exp(-i s (X_j + x_j)),
/// s = +-1 the drive direction.  Phase factors use the model's DVR grids.
/// Throws std::invalid_argument for free-space models or Omega = 0.
SparseOperator tau_operator(const LindbladModel& model);
/// Reflected-field operator, theta = -(i/Omega) sum_j sigma_j^- exp(+i s (X_j + x_j)).
SparseOperator theta_operator(const LindbladModel& model);

/// Tr[op rho], full composite trace.
cplx expectation(const SparseOperator& op, const DensityMatrix& rho);

/// T = Tr[tau^dag tau rho] and R = Tr[theta^dag theta rho] (real parts).
double transmission(const DensityMatrix& rho, const SparseOperator& tau);
double reflection(const DensityMatrix& rho, const SparseOperator& theta);

struct Observables {
  double T = 0.0;
  double R = 0.0;
  double loss() const { return 1.0 - R - T; }
};

/// Precomputed tau^dag tau and theta^dag theta for repeated measurements.
class ObservableSet {
 public:
  explicit ObservableSet(const LindbladModel& model);
  Observables measure(const DensityMatrix& rho) const;
  Observables measure(const DenseMatrix& rho) const;

 private:
  SparseOperator t_op_;
  SparseOperator r_op_;
};

struct SpectrumRow {
  double delta_over_gamma = 0.0;
  double T = 0.0;
  double R = 0.0;
  double loss = 0.0;
  bool flagged = false;
};

/// One curve: rows plus the parameters that produced it.
struct Spectrum {
  ModelParams params;
  int n_max = 0;
  std::string series;  ///< fixed, averaged, nmax0, ...
  std::vector<SpectrumRow> rows;

  /// 0 <= T, R <= 1 + 1e-9 and loss >= -1e-9 on every row.
  bool physical() const;
  double max_T() const;
};

}  // namespace arraylight
