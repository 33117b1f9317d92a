#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "arraylight/density_matrix.hpp"
#include "arraylight/model.hpp"

namespace arraylight {

enum class SolverMethod { automatic, direct, propagate, both };

/// How the direct solve fixes the normalisation.
///  frozen_motion: the all-ground electronic block is held at the initial
///    motional state and every other block is solved exactly (default when
///    atoms move; recoil heating of the ground block is reported as drift).
///  trace_row: the full Liouvillian with one equation replaced by Tr rho = 1.
enum class DirectFormulation { automatic, frozen_motion, trace_row };

/// Linear algebra for the frozen-motion formulation.
///  sector_iteration: block-Jacobi over excitation-number sectors, each block a
///    small Sylvester solve (fast; falls back to sparse_lu if it stalls).
///  sparse_lu: one sparse LU of the whole non-ground system.
enum class LinearSolver { sector_iteration, sparse_lu };

struct SolverConfig {
  SolverMethod method = SolverMethod::automatic;
  DirectFormulation formulation = DirectFormulation::automatic;
  double dt = 0.05;             ///< initial step, 1/Gamma
  double convergence = 1e-9;    ///< relative change of (T, R) per window
  double t_max = 1e5;           ///< 1/Gamma
  double window = 10.0;         ///< observable sampling interval, 1/Gamma
  double rtol = 1e-8;           ///< propagation local error control
  double atol = 1e-13;          ///< scaled by min(1, Omega^2) inside the integrator
  LinearSolver linear_solver = LinearSolver::sector_iteration;
  int max_sweeps = 500;         ///< sector-iteration cap
  int refinement_steps = 2;     ///< iterative refinement on the sparse LU solve
  std::size_t direct_max_dim = 200;
  double drift_tolerance = 1e-6;

  /// Throws std::invalid_argument unless dt, convergence, window, t_max > 0.
  void validate() const;
};

/// The direct solve found no unique steady state.
class SingularSteadyStateError : public std::runtime_error {
 public:
  SingularSteadyStateError(const std::string& what, long nullity)
      : std::runtime_error(what), nullity_(nullity) {}
  /// Estimated null-space dimension, -1 when too large to estimate.
  long nullity() const { return nullity_; }

 private:
  long nullity_;
};

struct SteadyStateResult {
  explicit SteadyStateResult(DensityMatrix r) : rho(std::move(r)) {}

  DensityMatrix rho;
  SolverMethod method = SolverMethod::direct;
  bool converged = true;
  double residual = 0.0;            ///< max |L(rho)| over the solved equations
  double vibrational_drift = 0.0;   ///< motional-population change (see docs)
  double elapsed = 0.0;             ///< propagated time, 1/Gamma
  double cross_check = std::numeric_limits<double>::quiet_NaN();  ///< max |direct - propagated|
  std::string note;

  bool flagged(double drift_tolerance = 1e-6) const {
    return !converged || vibrational_drift > drift_tolerance || cross_check > 1e-9;
  }
};

/// Scalar observables sampled during propagation; convergence is declared on them.
using Monitor = std::function<std::pair<double, double>(const DenseMatrix&)>;

/// Direct sparse solve of L(rho) = 0.  rho0 supplies the motional state of the
/// ground block in the frozen-motion formulation (default: vibrational ground).
SteadyStateResult steady_state_direct(const LindbladModel& model, const SolverConfig& config = {},
                                      const DensityMatrix* rho0 = nullptr);

/// Adaptive Dormand-Prince integration until the monitored observables settle
/// (waveguide default: T and R).  Re-Hermitises every step; returns the best
/// estimate with converged = false if t_max is reached.
SteadyStateResult propagate(const LindbladModel& model, const DensityMatrix& rho0, const SolverConfig& config = {},
                            Monitor monitor = {});

/// Fixed-time evolution with the same integrator (no convergence test).
DensityMatrix propagate_to(const LindbladModel& model, const DensityMatrix& rho0, double t,
                           const SolverConfig& config = {});

/// Dispatch on config.method (automatic: direct when dim <= direct_max_dim).
SteadyStateResult solve_steady_state(const LindbladModel& model, const SolverConfig& config = {},
                                     const DensityMatrix* rho0 = nullptr);

}  // namespace arraylight
