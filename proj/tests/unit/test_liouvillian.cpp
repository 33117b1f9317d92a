#include <gtest/gtest.h>

#include <cmath>

#include "arraylight/density_matrix.hpp"
#include "arraylight/liouvillian.hpp"
#include "arraylight/model.hpp"
#include "support/oracles.hpp"

using namespace arraylight;

namespace {

ModelParams trapped(std::vector<double> centers, int n_max, double eta, int oversample) {
  ModelParams p = waveguide_params(centers, 0.05, 0.36);
  p.axes.push_back({Vec3::UnitX(), 0.02, eta, n_max});
  p.dvr_oversample = oversample;
  return p;
}

double excited_population(const CompositeBasis& b, const DenseMatrix& m) {
  double e = 0.0;
  for (std::size_t k = 0; k < b.dim(); ++k) e += b.excitations(k) * m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
  return e;
}

}  // namespace

TEST(Liouvillian, DarkVacuum) {
  ModelParams p = trapped({0.0, 1.8 * kPi}, 2, 0.056, 16);
  p.rabi = 0.0;
  const auto m = assemble_model(p);
  const DensityMatrix g = DensityMatrix::ground(m.basis());
  // H0 is diagonal, so the motional ground state is stationary too.
  EXPECT_LT(oracle::max_abs(liouvillian_apply(m, g.data())), 1e-15);
}

TEST(Liouvillian, SingleAtomDecayRate) {
  ModelParams p = waveguide_params({0.0}, 0.0, 0.0);
  const auto m = assemble_model(p);
  DenseMatrix rho = DenseMatrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  const DenseMatrix d = liouvillian_apply(m, rho);
  EXPECT_NEAR(d(1, 1).real(), -1.0, 1e-15);
  EXPECT_NEAR(d(0, 0).real(), 1.0, 1e-15);
}

TEST(Liouvillian, SymmetricStateDecaysAtCollectiveRate) {
  const auto m = assemble_model(waveguide_params({0.0, 1.8 * kPi}, 0.0, 0.0));
  // Independent rate: eigenvalues of the 2x2 non-Hermitian single-excitation block.
  const double w = 0.5 * std::sin(1.8 * kPi), g = std::cos(1.8 * kPi);
  Eigen::Matrix2cd heff;
  heff << cplx(0, -0.5), cplx(w, -0.5 * g), cplx(w, -0.5 * g), cplx(0, -0.5);
  const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(heff);
  const double fast = -2.0 * std::min(es.eigenvalues()(0).imag(), es.eigenvalues()(1).imag());

  // |S> = (|eg> + |ge>)/sqrt 2 in the ordering atom 0 slowest: |ge> = 1, |eg> = 2.
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(4);
  s(1) = s(2) = 1.0 / std::sqrt(2.0);
  const DenseMatrix rho = s * s.adjoint();
  const double rate = -excited_population(m.basis(), liouvillian_apply(m, rho));
  EXPECT_NEAR(rate, 1.8090169943749475, 1e-13);
  EXPECT_NEAR(rate, fast, 1e-13);
}

TEST(Liouvillian, PinnedMatchesTextbookMasterEquation) {
  const std::vector<double> x = {0.4, 0.4 + 1.8 * kPi, 0.4 + 3.9 * kPi};
  ModelParams p = waveguide_params(x, 0.2, -0.3);
  const auto m = assemble_model(p);
  const auto ref = oracle::waveguide_lindblad(x, 0.2, -0.3, 0.0, 0.0, 1, 0);
  const DenseMatrix rho = oracle::random_density(8, 21);
  EXPECT_LT(oracle::max_abs(liouvillian_apply(m, rho) - ref.apply(rho)), 1e-14);
}

TEST(Liouvillian, TrappedMatchesDenseOracle) {
  for (int oversample : {0, 6}) {
    const std::vector<double> x = {0.0, 1.8 * kPi};
    const auto m = assemble_model(trapped(x, 2, 0.056, oversample));
    const auto ref = oracle::waveguide_lindblad(x, 0.05, 0.36, 0.02, 0.056, 3, 2 + oversample);
    const DenseMatrix rho = oracle::random_density(36, 5);
    EXPECT_LT(oracle::max_abs(m.hamiltonian().to_dense() - ref.h), 1e-14) << oversample;
    EXPECT_LT(oracle::max_abs(m.decay().to_dense() - ref.k), 1e-14) << oversample;
    EXPECT_LT(oracle::max_abs(liouvillian_apply(m, rho) - ref.apply(rho)), 1e-14) << oversample;
  }
}

TEST(Liouvillian, TracePreservation) {
  // Exact for pinned atoms and for unitary (n_fin = n_max) DVR phases.
  const std::vector<ModelParams> cases = {waveguide_params({0.0, 1.8 * kPi, 3.7 * kPi}, 0.1, 0.2),
                                          trapped({0.0, 1.8 * kPi}, 4, 0.056, 0)};
  for (const auto& p : cases) {
    const auto m = assemble_model(p);
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const DenseMatrix rho = oracle::random_density(static_cast<int>(m.dim()), seed);
      EXPECT_LE(std::abs(liouvillian_apply(m, rho).trace()), 1e-12);
    }
  }
}

TEST(Liouvillian, TraceLeaksOnlyThroughTruncationWhenOversampled) {
  const auto m = assemble_model(trapped({0.0, 1.8 * kPi}, 1, 0.056, 16));
  const DenseMatrix rho = oracle::random_density(16, 3);
  const double leak = std::abs(liouvillian_apply(m, rho).trace());
  EXPECT_GT(leak, 1e-12);
  // Kicked amplitude leaving levels 0..n_max is ~ eta^2 (n_max + 1) per atom.
  EXPECT_LT(leak, 2 * 2 * 0.056 * 0.056);
}

TEST(Liouvillian, HermiticityPreservation) {
  const auto m = assemble_model(trapped({0.0, 1.8 * kPi}, 3, 0.056, 16));
  const DenseMatrix rho = oracle::random_density(static_cast<int>(m.dim()), 9);
  const DenseMatrix d = liouvillian_apply(m, rho);
  EXPECT_LE(oracle::max_abs(d - d.adjoint()), 1e-12);
}

TEST(Liouvillian, ParallelMatchesSerialReference) {
  const auto m = assemble_model(trapped({0.0, 1.8 * kPi}, 4, 0.056, 16));
  const DenseMatrix rho = oracle::random_density(static_cast<int>(m.dim()), 4);
  const DenseMatrix a = liouvillian_apply(m, rho);
  const DenseMatrix b = reference::liouvillian_apply(m, rho);
  EXPECT_LE(oracle::max_abs(a - b), 1e-15 * std::max(1.0, oracle::max_abs(b)));
}

TEST(Liouvillian, SuperoperatorMatchesApply) {
  const auto m = assemble_model(trapped({0.0, 1.8 * kPi}, 1, 0.056, 16));
  const DenseMatrix rho = oracle::random_density(16, 12);
  const SuperOperator s = liouvillian_superoperator(m);
  ASSERT_EQ(s.rows(), 256);
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
  const Eigen::VectorXcd out = s * v;
  const DenseMatrix d = liouvillian_apply(m, rho);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      EXPECT_NEAR(std::abs(out(static_cast<Eigen::Index>(vec_index(16, r, c))) -
                           d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))),
                  0.0, 1e-15);
}

TEST(Liouvillian, DimensionMismatchThrows) {
  const auto m = assemble_model(waveguide_params({0.0}, 0.1, 0.0));
  EXPECT_THROW(liouvillian_apply(m, DenseMatrix::Zero(3, 3)), std::invalid_argument);
  EXPECT_THROW(reference::liouvillian_apply(m, DenseMatrix::Zero(3, 3)), std::invalid_argument);
}
