#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "arraylight/quadrature.hpp"
#include "arraylight/sparse_operator.hpp"
#include "arraylight/spatial_average.hpp"
#include "arraylight/steady_state.hpp"
#include "support/oracles.hpp"

using namespace arraylight;

namespace {

ModelParams two_atoms(double eta, double delta, double trap_freq = 1e3 / (2 * kPi * 1e7)) {
  ModelParams p = waveguide_params({0.0, 1.8 * kPi}, 1e-4, delta);
  p.axes.push_back({Vec3::UnitX(), trap_freq, eta, 0});
  return p;
}

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST(Quadrature, NodesAndWeights) {
  for (int n : {1, 2, 5, 15, 30}) {
    const auto q = gauss_hermite(n);
    ASSERT_EQ(q.nodes.size(), static_cast<std::size_t>(n));
    EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 1.0, 1e-14);
    const auto roots = oracle::hermite_roots(n);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(q.nodes[static_cast<std::size_t>(i)], std::sqrt(2.0) * roots[static_cast<std::size_t>(i)],
                  1e-12 * std::max(1.0, std::abs(q.nodes[static_cast<std::size_t>(i)])));
    }
  }
  EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
}

TEST(Quadrature, PolynomialExactness) {
  const int n = 8;
  const auto q = gauss_hermite(n);
  for (int deg = 0; deg <= 2 * n - 1; ++deg) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += q.weights[static_cast<std::size_t>(i)] * std::pow(q.nodes[static_cast<std::size_t>(i)], deg);
    const double exact = deg % 2 ? 0.0 : double_factorial(deg - 1);
    EXPECT_NEAR(s, exact, 1e-11 * std::max(1.0, exact)) << deg;
  }
}

TEST(Quadrature, PairwiseSum) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  const double a = pairwise_sum(v);
  EXPECT_EQ(a, pairwise_sum(v));
  EXPECT_NEAR(a, 7.485470860550345, 1e-13);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(CoupledDipole, SingleAtomAnalytic) {
  ModelParams p = waveguide_params({0.7}, 1e-4, 0.3);
  const auto b = coupled_dipole_solve(p, {Vec3(0.7, 0, 0)});
  const cplx expect = 0.5e-4 * std::exp(kI * 0.7) / cplx(0.3, 0.5);
  EXPECT_LT(std::abs(b(0) - expect), 1e-15 * std::abs(expect));
}

TEST(CoupledDipole, TwoAtomsMatchCramerOracle) {
  for (double d : {-0.5, 0.0, 0.36, 0.9}) {
    const auto o = fixed_position_observables(waveguide_params({0.0, 1.8 * kPi}, 1e-4, d), {Vec3::Zero(), Vec3::Zero()});
    const auto ref = oracle::two_atom_cd(1.8 * kPi, d);
    EXPECT_NEAR(o.T, ref.first, 1e-14);
    EXPECT_NEAR(o.R, ref.second, 1e-14);
  }
}

TEST(CoupledDipole, AmplitudesMatchPinnedMasterEquation) {
  const ModelParams p = waveguide_params({0.0, 1.8 * kPi}, 1e-5, 0.36);
  const auto beta = coupled_dipole_solve(p, p.trap_centers);
  const auto m = assemble_model(p);
  SolverConfig cfg;
  cfg.formulation = DirectFormulation::trace_row;
  const auto ss = steady_state_direct(m, cfg);
  for (std::size_t j = 0; j < 2; ++j) {
    const cplx s = expectation(lift_atom_operator(m.basis(), j, local::lowering(1)), ss.rho);
    EXPECT_LE(std::abs(beta(static_cast<Eigen::Index>(j)) - s), 1e-8 * std::abs(beta(static_cast<Eigen::Index>(j))));
  }
}

TEST(CoupledDipole, EquivalentToMasterEquationOnFiftyDetunings) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double d = -1.0 + 2.0 * i / 49.0;
    const ModelParams p = waveguide_params({0.0, 1.8 * kPi}, 1e-5, d);
    const std::vector<Vec3> zero(2, Vec3::Zero());
    const auto a = fixed_position_observables(p, zero, FixedMethod::coupled_dipole);
    const auto b = fixed_position_observables(p, zero, FixedMethod::master_equation);
    worst = std::max({worst, std::abs(a.T - b.T), std::abs(a.R - b.R)});
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(CoupledDipole, DarkResonanceIsSingular) {
  EXPECT_THROW(coupled_dipole_solve(waveguide_params({0.0, kPi}, 1e-4, 0.0), {Vec3::Zero(), Vec3(kPi, 0, 0)}),
               std::runtime_error);
}

TEST(FixedPosition, SingleAtomIgnoresDisplacement) {
  const ModelParams p = waveguide_params({0.0}, 1e-4, 0.4);
  for (double x : {0.0, 0.3, -2.0}) {
    EXPECT_NEAR(fixed_position_observables(p, {Vec3(x, 0, 0)}).T, oracle::single_atom_T(0.4), 1e-14);
  }
  EXPECT_THROW(fixed_position_observables(p, {}), std::invalid_argument);
}

TEST(Average, DeltaDistributionEqualsFixed) {
  const ModelParams p = two_atoms(0.056, 0.36);
  const auto fixed = fixed_position_observables(p, {Vec3::Zero(), Vec3::Zero()});
  for (auto scheme : {AverageScheme::relative, AverageScheme::product}) {
    AverageOptions o;
    o.scheme = scheme;
    const auto a = average_observables(p, PositionDistribution::delta(2), o);
    // Every node sits at zero displacement; only the weight sum can round.
    EXPECT_NEAR(a.T, fixed.T, 1e-14);
    EXPECT_NEAR(a.R, fixed.R, 1e-14);
  }
}

TEST(Average, RelativeCoordinateMatchesProductRule) {
  const ModelParams p = two_atoms(0.056, 0.3);
  const auto dist = PositionDistribution::ground_state(p);
  AverageOptions rel, prod;
  rel.scheme = AverageScheme::relative;
  prod.scheme = AverageScheme::product;
  const auto a = average_observables(p, dist, rel);
  const auto b = average_observables(p, dist, prod);
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_NEAR(a.T, b.T, 2e-6);
  EXPECT_NEAR(a.R, b.R, 2e-6);
  EXPECT_LT(a.evaluations, b.evaluations);
}

TEST(Average, RelativeMatchesBruteForceIntegral) {
  const double eta = 0.056, delta = 0.36;
  const ModelParams p = two_atoms(eta, delta);
  const double sigma_rel = eta * std::sqrt(2.0);
  const double ref = oracle::gaussian_mean(
      [&](double x) { return oracle::two_atom_cd(1.8 * kPi + x, delta).first; }, sigma_rel, 20000);
  const auto a = average_observables(p, PositionDistribution::ground_state(p));
  EXPECT_TRUE(a.converged);
  EXPECT_NEAR(a.T, ref, 2e-6);
}

TEST(Average, ThermalEqualsGroundAtMatchedVariance) {
  const double nbar = 1.5;
  const ModelParams ground = two_atoms(0.056, 0.33);
  ModelParams narrower = ground;
  narrower.axes[0].eta = 0.056 / std::sqrt(2 * nbar + 1);
  AverageOptions o;
  const auto g = average_observables(ground, PositionDistribution::ground_state(ground), o);
  const auto t = average_observables(narrower, PositionDistribution::thermal(narrower, nbar), o);
  EXPECT_NEAR(g.T, t.T, o.tolerance);
  EXPECT_NEAR(g.R, t.R, o.tolerance);
  EXPECT_THROW(PositionDistribution::thermal(ground, -1.0), std::invalid_argument);
}

TEST(Average, MonteCarloAgreesAndIsReproducible) {
  const ModelParams p = two_atoms(0.036, 0.3);
  const auto dist = PositionDistribution::ground_state(p);
  const auto gh = average_observables(p, dist);
  AverageOptions mc;
  mc.scheme = AverageScheme::monte_carlo;
  mc.mc_samples = 20000;
  const auto a = average_observables(p, dist, mc);
  const auto b = average_observables(p, dist, mc);
  EXPECT_EQ(a.T, b.T);
  EXPECT_NEAR(a.T, gh.T, 5 * a.T_error);
  EXPECT_NEAR(a.R, gh.R, 5 * a.R_error);
  mc.seed = 99;
  EXPECT_NE(average_observables(p, dist, mc).T, a.T);
}

TEST(Average, SteepFeatureRaisesOrderUntilConverged) {
  const ModelParams p = two_atoms(0.056, 0.22);
  AverageOptions o;
  const auto a = average_observables(p, PositionDistribution::ground_state(p), o);
  EXPECT_TRUE(a.converged);
  EXPECT_GT(a.order, 2 * o.order);
  o.max_order = 2 * o.order;
  const auto b = average_observables(p, PositionDistribution::ground_state(p), o);
  EXPECT_FALSE(b.converged);
  EXPECT_EQ(b.order, 2 * o.order);
}

TEST(Validity, SlowTrapIsValidAndFastTrapIsFlagged) {
  const auto slow = sudden_validity_check(two_atoms(0.036, 0.0));
  EXPECT_TRUE(slow.valid);
  EXPECT_LT(slow.ratio, 1e-3);
  EXPECT_NEAR(slow.widths.front(), 1.0 + std::cos(1.8 * kPi) * -1.0, 1e-12);
  EXPECT_NEAR(slow.widths.back(), 1.0 + std::cos(1.8 * kPi), 1e-12);

  const auto fast = sudden_validity_check(two_atoms(0.056, 0.0, 1e7 / (2 * kPi * 1e7)));
  EXPECT_FALSE(fast.valid);
  EXPECT_FALSE(fast.warnings.empty());

  ModelParams strong = two_atoms(0.036, 0.0);
  strong.rabi = 0.5;
  EXPECT_FALSE(sudden_validity_check(strong).warnings.empty());
}

TEST(Validity, HalfWavelengthWidths) {
  const auto r = sudden_validity_check(waveguide_params({0.0, kPi}, 1e-4, 0.0));
  ASSERT_EQ(r.widths.size(), 2u);
  EXPECT_NEAR(r.widths[0], 0.0, 1e-12);
  EXPECT_NEAR(r.widths[1], 2.0, 1e-12);
}
