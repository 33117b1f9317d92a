#pragma once

#include <complex>

#include <Eigen/Dense>

// Internal unit system: Gamma = 1, k0 = 1, hbar = 1.  Energies and rates are
// in units of the single-atom decay rate, lengths in units of 1/k0.
namespace arraylight {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace arraylight
