#pragma once

#include <functional>

#include "arraylight/types.hpp"

namespace arraylight {

/// Coherent (omega) and dissipative (gamma) parts of the pair interaction, in
/// units of Gamma.
struct KernelValue {
  double omega = 0.0;
  double gamma = 0.0;
};

/// Waveguide kernels for the signed phase separation s = k0 (X_j + x_j - X_j' - x_j'):
///   omega = sin(|s|)/2,  gamma = cos(s).
KernelValue waveguide_kernel(double s);

/// Spherical Bessel/Neumann functions of order 0 and 2 from
///   h0(s) = e^{is}/(is),  h2(s) = (-3i/s^3 - 3/s^2 + i/s) e^{is},
/// j = Re h, n = Im h.  j0/j2 switch to their power series below s = 1.
struct SphericalHankel {
  double j0, n0, j2, n2;
};
SphericalHankel spherical_hankel(double s);

/// Free-space kernels for separation vector s (units 1/k0) and dipole unit
/// vector q.  The angular weight is (3 (s^.q)(s^.q*) - 1)/2.
/// free_space_kernel throws std::domain_error at |s| = 0 (omega is singular);
/// free_space_gamma returns 1 there.
KernelValue free_space_kernel(const Vec3& s, const CVec3& dipole);
double free_space_gamma(const Vec3& s, const CVec3& dipole);

/// Kernel used by model assembly.  Swapping the 1D and 3D physics only swaps
/// this object; the superoperator plumbing is shared.
struct PairKernel {
  /// Both parts; may throw std::domain_error where omega is singular.
  std::function<KernelValue(const Vec3&)> evaluate;
  /// Dissipative part only; must be finite everywhere including s = 0.
  std::function<double(const Vec3&)> gamma;
  /// gamma at zero separation (the j = j' term of the dissipator).
  double self_gamma = 1.0;
};

PairKernel waveguide_pair_kernel();
PairKernel free_space_pair_kernel(const CVec3& dipole);

}  // namespace arraylight
