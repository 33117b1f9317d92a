#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "arraylight/config.hpp"
#include "arraylight/model.hpp"
#include "arraylight/observables.hpp"
#include "arraylight/steady_state.hpp"

namespace arraylight {

namespace si {
inline constexpr double hbar = 1.054571817e-34;  // J s
}

/// Dimensionless parameters implied by an SI configuration.
struct DerivedParams {
  double k0 = 0.0;                 ///< 2 pi / lambda, m^-1
  double eta = 0.0;                ///< k0 sqrt(hbar / (2 M omega_t))
  double eta_sq = 0.0;
  double sigma_over_lambda = 0.0;  ///< relative-separation spread over lambda, eta / (pi sqrt 2)
  double trap_over_gamma = 0.0;
  double k0_d = 0.0;               ///< k0 times the trap spacing
  std::size_t dim = 0;             ///< Hilbert-space dimension of the full-quantum model
};

DerivedParams derive_params(const ExperimentConfig& config);
std::string format_derived(const DerivedParams& derived);

/// Internal-unit model parameters at one detuning.  Trap axes are always set
/// (the averaged mode needs eta); fixed and averaged sweeps pin the atoms.
ModelParams to_model_params(const ExperimentConfig& config, double detuning);

struct SweepOptions {
  SolverConfig solver;
  bool parallel = true;
};

/// One spectrum per config; points run in parallel, rows come back in
/// detuning order.
Spectrum run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

/// Named figure reproductions: fig1, fig2, fig3, fig4, d095.
std::vector<ExperimentConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

/// CSV: '#' header lines (parameters and hash per series), then
/// delta_over_gamma,T,R,loss,series with 12 significant digits.
void write_csv(std::ostream& out, const std::vector<ExperimentConfig>& configs,
               const std::vector<Spectrum>& spectra);

/// True if any row of any spectrum is flagged.
bool any_flagged(const std::vector<Spectrum>& spectra);

}  // namespace arraylight
