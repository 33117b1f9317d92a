#include <gtest/gtest.h>

#include <cmath>

#include "arraylight/observables.hpp"
#include "arraylight/spatial_average.hpp"
#include "arraylight/steady_state.hpp"
#include "support/oracles.hpp"

using namespace arraylight;

namespace {

Observables solve(const ModelParams& p) {
  const auto m = assemble_model(p);
  return ObservableSet(m).measure(steady_state_direct(m).rho);
}

ModelParams trapped(std::vector<double> centers, double delta, int n_max = 2) {
  ModelParams p = waveguide_params(centers, 1e-4, delta);
  p.axes.push_back({Vec3::UnitX(), 0.01, 0.056, n_max});
  return p;
}

}  // namespace

TEST(Observables, GroundStateTransmitsEverything) {
  const auto m = assemble_model(trapped({0.0, 1.8 * kPi}, 0.3));
  const auto o = ObservableSet(m).measure(DensityMatrix::ground(m.basis()));
  EXPECT_NEAR(o.T, 1.0, 1e-15);
  EXPECT_NEAR(o.R, 0.0, 1e-15);
  const DensityMatrix g = DensityMatrix::ground(m.basis());
  EXPECT_NEAR(transmission(g, tau_operator(m)), 1.0, 1e-15);
  EXPECT_NEAR(reflection(g, theta_operator(m)), 0.0, 1e-15);
}

TEST(Observables, SingleAtomLorentzian) {
  auto o = solve(waveguide_params({0.0}, 1e-4, 0.0));
  EXPECT_NEAR(o.T, 0.0, 1e-7);
  EXPECT_NEAR(o.R, 1.0, 1e-7);
  o = solve(waveguide_params({0.0}, 1e-4, 0.5));
  EXPECT_NEAR(o.T, 0.5, 1e-7);
  EXPECT_NEAR(o.R, 0.5, 1e-7);
  for (double d : {-0.8, 0.25, 1.0}) {
    o = solve(waveguide_params({1.234}, 1e-4, d));
    EXPECT_NEAR(o.T, oracle::single_atom_T(d), 1e-7);
    EXPECT_NEAR(o.R, 1.0 - oracle::single_atom_T(d), 1e-7);
  }
}

TEST(Observables, ExpectationIsRealForHermitianProducts) {
  const auto m = assemble_model(trapped({0.0, 1.8 * kPi}, 0.36));
  const auto ss = steady_state_direct(m);
  const SparseOperator tau = tau_operator(m);
  EXPECT_LE(std::abs(expectation(tau.adjoint() * tau, ss.rho).imag()), 1e-12);
  const SparseOperator th = theta_operator(m);
  EXPECT_LE(std::abs(expectation(th.adjoint() * th, ss.rho).imag()), 1e-12);
}

TEST(Observables, TranslationInvariance) {
  for (int n_max : {0, 2}) {
    const auto a = solve(trapped({0.0, 1.8 * kPi}, 0.36, n_max));
    const auto b = solve(trapped({0.77, 0.77 + 1.8 * kPi}, 0.36, n_max));
    EXPECT_NEAR(a.T, b.T, 1e-10) << n_max;
    EXPECT_NEAR(a.R, b.R, 1e-10) << n_max;
  }
  const auto a = solve(waveguide_params({0.0, 1.8 * kPi, 3.7 * kPi}, 1e-4, 0.2));
  const auto b = solve(waveguide_params({-2.5, -2.5 + 1.8 * kPi, -2.5 + 3.7 * kPi}, 1e-4, 0.2));
  EXPECT_NEAR(a.T, b.T, 1e-10);
  EXPECT_NEAR(a.R, b.R, 1e-10);
}

TEST(Observables, LosslessForPinnedAtoms) {
  for (double d : {0.0, 0.2, 0.36, 0.6}) {
    const auto o = solve(waveguide_params({0.0, 1.8 * kPi}, 1e-4, d));
    EXPECT_NEAR(o.loss(), 0.0, 1e-7);
  }
}

TEST(Observables, BackwardDriveMirrorsForward) {
  ModelParams p = waveguide_params({0.0, 1.8 * kPi}, 1e-4, 0.3);
  const auto fwd = solve(p);
  p.drive_direction = -Vec3::UnitX();
  const auto back = solve(p);
  EXPECT_NEAR(fwd.T, back.T, 1e-10);
  EXPECT_NEAR(fwd.R, back.R, 1e-10);
}

TEST(Observables, WeakDriveLinearity) {
  // Saturation corrections are O(Omega^2): halving Omega cuts the deviation
  // from the linear-response value by four.
  const auto lin = oracle::two_atom_cd(1.8 * kPi, 0.36);
  const double e1 = std::abs(solve(waveguide_params({0.0, 1.8 * kPi}, 2e-4, 0.36)).T - lin.first);
  const double e2 = std::abs(solve(waveguide_params({0.0, 1.8 * kPi}, 1e-4, 0.36)).T - lin.first);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
  // Single atom: the change on halving Omega follows the Bloch saturation term,
  // R = (1/4) / (Delta^2 + 1/4 + Omega^2 / 2), i.e. 1.5 Omega^2 relative at resonance.
  for (double d : {0.0, 0.5, 1.0}) {
    const auto a = solve(waveguide_params({0.0}, 1e-4, d));
    const auto b = solve(waveguide_params({0.0}, 0.5e-4, d));
    const auto bloch = [d](double w) { return 0.25 / (d * d + 0.25 + 0.5 * w * w); };
    const double expect = bloch(0.5e-4) - bloch(1e-4);
    EXPECT_NEAR(b.R - a.R, expect, 1e-3 * expect) << d;
    EXPECT_NEAR(a.T - b.T, expect, 1e-3 * expect) << d;
  }
}

TEST(Observables, HalfWavelengthPairReflects) {
  const auto o = fixed_position_observables(waveguide_params({0.0, kPi}, 1e-4, 1e-6), {Vec3::Zero(), Vec3::Zero()});
  EXPECT_NEAR(o.R, 1.0, 1e-9);
  EXPECT_NEAR(o.T, 0.0, 1e-9);
}

TEST(Observables, RejectsFreeSpaceAndZeroDrive) {
  ModelParams p;
  p.geometry = Geometry::free_space_3d;
  p.trap_centers = {Vec3::Zero()};
  EXPECT_THROW(tau_operator(assemble_model(p)), std::invalid_argument);
  EXPECT_THROW(tau_operator(assemble_model(waveguide_params({0.0}, 0.0, 0.0))), std::invalid_argument);
}

TEST(Spectrum, PhysicalAndMax) {
  Spectrum s;
  s.rows = {{0.0, 0.2, 0.8, 0.0, false}, {0.1, 0.9, 0.1, 0.0, false}};
  EXPECT_TRUE(s.physical());
  EXPECT_DOUBLE_EQ(s.max_T(), 0.9);
  s.rows.push_back({0.2, 1.1, 0.0, -0.1, false});
  EXPECT_FALSE(s.physical());
}
