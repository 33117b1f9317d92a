#pragma once

#include <Eigen/SparseCore>

#include "arraylight/model.hpp"
#include "arraylight/types.hpp"

namespace arraylight {

/// d rho/dt = -i (H_eff rho - rho H_eff^dag) + sum_t L_t rho R_t.
/// Parallel over columns of rho (OpenMP).  Throws std::invalid_argument on a
/// dimension mismatch.
DenseMatrix liouvillian_apply(const LindbladModel& model, const DenseMatrix& rho);

namespace reference {
/// Straightforward serial evaluation of the same generator, kept as the
/// correctness baseline for the parallel kernel.
DenseMatrix liouvillian_apply(const LindbladModel& model, const DenseMatrix& rho);
}  // namespace reference

using SuperOperator = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

/// Column-major vectorisation: vec(rho)[r + c * dim] = rho(r, c).
inline std::size_t vec_index(std::size_t dim, std::size_t row, std::size_t col) { return row + col * dim; }

/// The generator as a dim^2 x dim^2 sparse matrix acting on vec(rho).
SuperOperator liouvillian_superoperator(const LindbladModel& model);

}  // namespace arraylight
