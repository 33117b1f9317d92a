#include "arraylight/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace arraylight {

namespace {
constexpr double kSeriesCutoff = 1.0;

double angular_weight(const Vec3& unit, const CVec3& q) {
  const cplx sq = unit(0) * q(0) + unit(1) * q(1) + unit(2) * q(2);
  const cplx sqc = unit(0) * std::conj(q(0)) + unit(1) * std::conj(q(1)) + unit(2) * std::conj(q(2));
  return 0.5 * (3.0 * (sq * sqc).real() - 1.0);
}
}  // namespace

KernelValue waveguide_kernel(double s) { return {0.5 * std::sin(std::abs(s)), std::cos(s)}; }

SphericalHankel spherical_hankel(double s) {
  if (s <= 0.0) throw std::domain_error("spherical_hankel: argument must be positive");
  const cplx e = std::exp(kI * s);
  const cplx h0 = e / (kI * s);
  const cplx h2 = (-3.0 * kI / (s * s * s) - 3.0 / (s * s) + kI / s) * e;
  SphericalHankel out{h0.real(), h0.imag(), h2.real(), h2.imag()};
  // The regular parts cancel badly at small s; sum their power series instead.
  //   j_l(s) = s^l sum_k (-s^2/2)^k / (k! (2l + 2k + 1)!!)
  if (s < kSeriesCutoff) {
    const auto series = [s](int l) {
      const double x = -0.5 * s * s;
      double df = 1.0;
      for (int k = 3; k <= 2 * l + 1; k += 2) df *= k;
      double term = std::pow(s, l) / df, sum = term;
      for (int k = 1; k < 30 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
        term *= x / (k * (2.0 * l + 2.0 * k + 1.0));
        sum += term;
      }
      return sum;
    };
    out.j0 = series(0);
    out.j2 = series(2);
  }
  return out;
}

KernelValue free_space_kernel(const Vec3& s, const CVec3& dipole) {
  const double r = s.norm();
  if (r == 0.0) throw std::domain_error("free_space_kernel: coincident atoms (omega is singular)");
  const SphericalHankel h = spherical_hankel(r);
  const double w = angular_weight(s / r, dipole);
  return {0.5 * (h.n0 + w * h.n2), h.j0 + w * h.j2};
}

double free_space_gamma(const Vec3& s, const CVec3& dipole) {
  const double r = s.norm();
  if (r == 0.0) return 1.0;
  const SphericalHankel h = spherical_hankel(r);
  return h.j0 + angular_weight(s / r, dipole) * h.j2;
}

PairKernel waveguide_pair_kernel() {
  return {[](const Vec3& s) { return waveguide_kernel(s.x()); }, [](const Vec3& s) { return std::cos(s.x()); },
          1.0};
}

PairKernel free_space_pair_kernel(const CVec3& dipole) {
  return {[dipole](const Vec3& s) { return free_space_kernel(s, dipole); },
          [dipole](const Vec3& s) { return free_space_gamma(s, dipole); }, 1.0};
}

}  // namespace arraylight
