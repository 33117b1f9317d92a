#include "arraylight/density_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace arraylight {

DensityMatrix::DensityMatrix(DenseMatrix data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) throw std::invalid_argument("DensityMatrix: matrix not square");
}

DensityMatrix DensityMatrix::ground(const CompositeBasis& basis, std::span<const double> vib_populations) {
  std::vector<double> pops(basis.n_vib(), 0.0);
  if (vib_populations.empty()) {
    pops[0] = 1.0;
  } else {
    if (vib_populations.size() != basis.n_vib()) {
      throw std::invalid_argument("DensityMatrix::ground: need one population per vibrational level");
    }
    double total = 0.0;
    for (double p : vib_populations) {
      if (p < 0.0) throw std::invalid_argument("DensityMatrix::ground: negative population");
      total += p;
    }
    if (total <= 0.0) throw std::invalid_argument("DensityMatrix::ground: populations sum to zero");
    for (std::size_t n = 0; n < pops.size(); ++n) pops[n] = vib_populations[n] / total;
  }
  DenseMatrix rho = DenseMatrix::Zero(static_cast<Eigen::Index>(basis.dim()),
                                      static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t k : basis.ground_manifold()) {
    double p = 1.0;
    for (std::size_t j = 0; j < basis.n_atoms(); ++j) p *= pops[static_cast<std::size_t>(basis.vibrational(k, j))];
    rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = p;
  }
  return DensityMatrix(std::move(rho));
}

std::vector<double> DensityMatrix::thermal_populations(std::size_t n_vib, double nbar) {
  if (nbar < 0.0) throw std::invalid_argument("thermal_populations: nbar must be >= 0");
  std::vector<double> p(n_vib, 0.0);
  if (nbar == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double ratio = nbar / (1.0 + nbar);
  double total = 0.0;
  for (std::size_t n = 0; n < n_vib; ++n) {
    p[n] = std::pow(ratio, static_cast<double>(n));
    total += p[n];
  }
  for (double& v : p) v /= total;
  return p;
}

double DensityMatrix::hermiticity_error() const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_diagonal() const { return data_.diagonal().real().minCoeff(); }

void DensityMatrix::hermitize() {
  DenseMatrix h = 0.5 * (data_ + data_.adjoint());
  data_ = std::move(h);
}

void DensityMatrix::normalize() {
  const cplx t = trace();
  if (std::abs(t) == 0.0) throw std::runtime_error("DensityMatrix::normalize: zero trace");
  data_ /= t.real();
}

bool DensityMatrix::is_valid(double herm_tol, double trace_tol, double diag_tol) const {
  return hermiticity_error() <= herm_tol && std::abs(trace() - cplx(1.0)) <= trace_tol &&
         min_diagonal() >= -diag_tol;
}

}  // namespace arraylight
