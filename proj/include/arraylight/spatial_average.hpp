#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arraylight/model.hpp"
#include "arraylight/observables.hpp"
#include "arraylight/quadrature.hpp"

namespace arraylight {

enum class DistributionKind { vibrational_ground, thermal, delta };

/// Gaussian position spread of each atom about its trap center.  sigma[j] holds
/// the ground-state standard deviation (units 1/k0) along x, y, z; thermal
/// states widen it by sqrt(2 nbar + 1).
struct PositionDistribution {
  DistributionKind kind = DistributionKind::vibrational_ground;
  std::vector<Vec3> sigma;
  double nbar = 0.0;

  /// Standard deviations actually used for atom j.
  Vec3 effective_sigma(std::size_t j) const;

  /// Ground-state spread implied by the trap axes: sigma = eta along each axis.
  static PositionDistribution ground_state(const ModelParams& params);
  static PositionDistribution thermal(const ModelParams& params, double nbar);
  static PositionDistribution delta(std::size_t n_atoms);
};

/// Weak-drive dipole amplitudes beta_j for pinned atoms at `positions`:
///   sum_j' [Delta delta_jj' - Omega_jj' (1 - delta_jj') + (i/2) Gamma_jj'] beta_j' = (Omega/2) e^{i k.R_j}.
/// Throws std::runtime_error if the system is singular (perfectly dark mode).
Eigen::VectorXcd coupled_dipole_solve(const ModelParams& params, const std::vector<Vec3>& positions);

enum class FixedMethod { coupled_dipole, master_equation };

/// Pinned-atom T and R with atom j displaced to trap_centers[j] + displacements[j].
/// Waveguide only (free-space observables are not defined here).
Observables fixed_position_observables(const ModelParams& params, const std::vector<Vec3>& displacements,
                                       FixedMethod method = FixedMethod::coupled_dipole);

enum class AverageScheme { automatic, relative, product, monte_carlo };

struct AverageOptions {
  AverageScheme scheme = AverageScheme::automatic;
  int order = 15;
  int max_order = 240;      ///< doubling stops here even if not converged
  std::size_t mc_samples = 4096;
  std::uint64_t seed = 12345;
  double tolerance = 1e-6;  ///< target for the change on doubling the order
  FixedMethod method = FixedMethod::coupled_dipole;
};

struct AverageResult {
  double T = 0.0;
  double R = 0.0;
  double T_error = 0.0;  ///< |change on doubling the order| (or MC standard error)
  double R_error = 0.0;
  std::size_t evaluations = 0;
  int order = 0;             ///< order of the returned estimate (0 for Monte Carlo)
  AverageScheme scheme = AverageScheme::relative;
  bool converged = true;
  double loss() const { return 1.0 - R - T; }
};

/// Average of fixed_position_observables over the distribution.  Quadrature
/// orders double from options.order until two successive estimates agree to
/// options.tolerance; converged is false if max_order is reached first.  The
/// automatic scheme uses the relative coordinate for two waveguide atoms and
/// the tensor-product rule otherwise.
AverageResult average_observables(const ModelParams& params, const PositionDistribution& dist,
                                  const AverageOptions& options = {});

struct ValidityReport {
  std::vector<double> widths;  ///< collective decay rates of the pinned array, ascending
  double slowest_width = 0.0;
  double trap_freq = 0.0;
  double ratio = 0.0;          ///< trap_freq / slowest_width
  bool valid = true;
  std::vector<std::string> warnings;
};

/// Frozen-position averaging is trustworthy while the trap motion is slow
/// compared with the slowest collective decay.  Flags ratio >= threshold.
ValidityReport sudden_validity_check(const ModelParams& params, double threshold = 0.3);

}  // namespace arraylight
