#include "arraylight/observables.hpp"

#include <algorithm>
#include <stdexcept>

namespace arraylight {

namespace {

// sum_j sigma_j^- exp(i sign s (X_j + x_j)), scaled by `scale`.
SparseOperator field_sum(const LindbladModel& model, double sign, cplx scale) {
  const auto& params = model.params();
  if (params.geometry != Geometry::waveguide_1d) {
    throw std::invalid_argument("field operators are defined for the waveguide geometry only");
  }
  if (params.rabi == 0.0) throw std::invalid_argument("field operators need a nonzero Rabi frequency");
  const double s = sign * params.drive_direction.x();
  const auto& basis = model.basis();
  Eigen::Matrix2cd lower = Eigen::Matrix2cd::Zero();
  lower(0, 1) = 1.0;
  SparseOperator out(basis.dim());
  for (std::size_t j = 0; j < basis.n_atoms(); ++j) {
    const cplx phase = std::exp(kI * s * params.trap_centers[j].x());
    const DenseMatrix e = model.grids()[j].matrix_elements([s](const Vec3& r) { return std::exp(kI * s * r.x()); });
    out += lift_atom_operator(basis, j, local::product(lower, (scale * phase) * e));
  }
  return out;
}

}  // namespace

SparseOperator tau_operator(const LindbladModel& model) {
  const double inv = 1.0 / model.params().rabi;
  return SparseOperator::identity(model.dim()) + field_sum(model, -1.0, cplx(0.0, -inv));
}

SparseOperator theta_operator(const LindbladModel& model) {
  const double inv = 1.0 / model.params().rabi;
  return field_sum(model, +1.0, cplx(0.0, -inv));
}

cplx expectation(const SparseOperator& op, const DensityMatrix& rho) { return trace_of_product(op, rho.data()); }

double transmission(const DensityMatrix& rho, const SparseOperator& tau) {
  return expectation(tau.adjoint() * tau, rho).real();
}

double reflection(const DensityMatrix& rho, const SparseOperator& theta) {
  return expectation(theta.adjoint() * theta, rho).real();
}

ObservableSet::ObservableSet(const LindbladModel& model) {
  const SparseOperator tau = tau_operator(model);
  const SparseOperator theta = theta_operator(model);
  t_op_ = tau.adjoint() * tau;
  r_op_ = theta.adjoint() * theta;
}

Observables ObservableSet::measure(const DenseMatrix& rho) const {
  return {trace_of_product(t_op_, rho).real(), trace_of_product(r_op_, rho).real()};
}

Observables ObservableSet::measure(const DensityMatrix& rho) const { return measure(rho.data()); }

bool Spectrum::physical() const {
  return std::all_of(rows.begin(), rows.end(), [](const SpectrumRow& r) {
    return r.T >= -1e-9 && r.T <= 1.0 + 1e-9 && r.R >= -1e-9 && r.R <= 1.0 + 1e-9 && r.loss >= -1e-9;
  });
}

double Spectrum::max_T() const {
  double m = -1.0;
  for (const auto& r : rows) m = std::max(m, r.T);
  return m;
}

}  // namespace arraylight
