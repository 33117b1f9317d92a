#include "arraylight/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "arraylight/spatial_average.hpp"

namespace arraylight {

namespace {

// Detuning windows (units of Gamma).  Full-quantum points are coarser than
// the pinned/averaged curves because each one is a large sparse solve.
constexpr double kWideStart = 0.0, kWideStop = 0.72;
constexpr int kWidePoints = 200;
constexpr double kNarrowStart = 0.25, kNarrowStop = 0.45;
constexpr int kNarrowPoints = 81, kQuantumPoints = 21;
constexpr double kD095Start = 0.05, kD095Stop = 0.30;

ExperimentConfig base_3mm() {
  ExperimentConfig c;
  c.wavelength_m = 3.1e-3;
  c.separation_over_lambda = 0.9;
  c.mass_kg = 1.6605e-28;
  c.trap_freq_s = 1e3;
  return c;
}

ExperimentConfig base_2mm() {
  ExperimentConfig c = base_3mm();
  c.wavelength_m = 2e-3;
  return c;
}

ExperimentConfig with(ExperimentConfig c, SweepMode mode, int n_max, double start, double stop, int points) {
  c.mode = mode;
  c.n_max = n_max;
  c.detuning_start = start;
  c.detuning_stop = stop;
  c.detuning_points = points;
  return c;
}

std::vector<ExperimentConfig> curves(const ExperimentConfig& base, double start, double stop,
                                     const std::vector<int>& n_max) {
  std::vector<ExperimentConfig> out = {with(base, SweepMode::fixed, 0, start, stop, kNarrowPoints),
                                       with(base, SweepMode::averaged, 0, start, stop, kNarrowPoints)};
  for (int n : n_max) out.push_back(with(base, SweepMode::full_quantum, n, start, stop, kQuantumPoints));
  return out;
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

SpectrumRow evaluate_point(const ExperimentConfig& config, double delta, const SweepOptions& options) {
  const ModelParams p = to_model_params(config, delta);
  SpectrumRow row;
  row.delta_over_gamma = delta;
  switch (config.mode) {
    case SweepMode::fixed: {
      const std::vector<Vec3> zero(p.n_atoms(), Vec3::Zero());
      const Observables o = fixed_position_observables(p, zero, FixedMethod::master_equation);
      row.T = o.T;
      row.R = o.R;
      break;
    }
    case SweepMode::averaged: {
      const PositionDistribution dist = config.thermal_nbar > 0.0 ? PositionDistribution::thermal(p, config.thermal_nbar)
                                                                  : PositionDistribution::ground_state(p);
      AverageOptions opts;
      opts.order = config.quadrature_order;
      const AverageResult a = average_observables(p, dist, opts);
      row.T = a.T;
      row.R = a.R;
      row.flagged = !a.converged;
      break;
    }
    case SweepMode::full_quantum: {
      const LindbladModel model = assemble_model(p);
      const SteadyStateResult ss = solve_steady_state(model, options.solver);
      const Observables o = ObservableSet(model).measure(ss.rho);
      row.T = o.T;
      row.R = o.R;
      row.flagged = ss.flagged(options.solver.drift_tolerance);
      break;
    }
  }
  row.loss = 1.0 - row.R - row.T;
  const bool physical = row.T >= -1e-9 && row.T <= 1.0 + 1e-9 && row.R >= -1e-9 && row.R <= 1.0 + 1e-9 &&
                        row.loss >= -1e-9;
  row.flagged = row.flagged || !physical;
  return row;
}

}  // namespace

DerivedParams derive_params(const ExperimentConfig& config) {
  validate(config);
  DerivedParams d;
  d.k0 = 2.0 * kPi / config.wavelength_m;
  d.eta = d.k0 * std::sqrt(si::hbar / (2.0 * config.mass_kg * config.trap_freq_s));
  d.eta_sq = d.eta * d.eta;
  d.sigma_over_lambda = d.eta / (kPi * std::sqrt(2.0));
  d.trap_over_gamma = config.trap_freq_s / config.gamma_hz;
  d.k0_d = 2.0 * kPi * config.separation_over_lambda;
  const int axes = config.geometry == "3d" ? 3 : 1;
  const double n_vib = std::pow(config.n_max + 1.0, axes);
  d.dim = static_cast<std::size_t>(std::llround(std::pow(2.0 * n_vib, config.n_atoms)));
  return d;
}

std::string format_derived(const DerivedParams& d) {
  std::ostringstream os;
  os << "eta = " << fmt12(d.eta) << '\n'
     << "eta_sq = " << fmt12(d.eta_sq) << '\n'
     << "sigma_over_lambda = " << fmt12(d.sigma_over_lambda) << '\n'
     << "trap_over_gamma = " << fmt12(d.trap_over_gamma) << '\n'
     << "k0_d = " << fmt12(d.k0_d) << '\n'
     << "dim = " << d.dim << '\n';
  return os.str();
}

ModelParams to_model_params(const ExperimentConfig& config, double detuning) {
  const DerivedParams d = derive_params(config);
  ModelParams p;
  p.geometry = config.geometry == "3d" ? Geometry::free_space_3d : Geometry::waveguide_1d;
  p.rabi = config.rabi_over_gamma;
  p.detuning = detuning;
  for (int j = 0; j < config.n_atoms; ++j) p.trap_centers.emplace_back(j * d.k0_d, 0.0, 0.0);
  p.drive_direction = Vec3::UnitX();
  p.dvr_oversample = config.dvr_oversample;
  const std::vector<Vec3> dirs = p.geometry == Geometry::waveguide_1d
                                     ? std::vector<Vec3>{Vec3::UnitX()}
                                     : std::vector<Vec3>{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (const auto& dir : dirs) p.axes.push_back({dir, d.trap_over_gamma, d.eta, config.n_max});
  return p;
}

Spectrum run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  validate(config);
  if (config.geometry != "1d") {
    throw std::invalid_argument("run_sweep: transmission/reflection sweeps need geometry = 1d");
  }
  const std::vector<double> det = config.detunings();
  Spectrum s;
  s.params = to_model_params(config, det.empty() ? 0.0 : det.front());
  s.n_max = config.n_max;
  s.series = config.series_tag();
  s.rows.resize(det.size());

  std::string error;
  const auto n = static_cast<std::ptrdiff_t>(det.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      s.rows[static_cast<std::size_t>(i)] = evaluate_point(config, det[static_cast<std::size_t>(i)], options);
    } catch (const std::exception& e) {
#pragma omp critical(arraylight_sweep_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error("run_sweep (" + s.series + "): " + error);
  return s;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "d095"}; }

std::vector<ExperimentConfig> preset(const std::string& name) {
  if (name == "fig1") {
    const ExperimentConfig b = base_3mm();
    return {with(b, SweepMode::fixed, 0, kWideStart, kWideStop, kWidePoints),
            with(b, SweepMode::averaged, 0, kWideStart, kWideStop, kWidePoints)};
  }
  if (name == "fig2") return curves(base_3mm(), kNarrowStart, kNarrowStop, {0, 4});
  if (name == "fig3") return curves(base_2mm(), kNarrowStart, kNarrowStop, {0, 1, 2});
  if (name == "fig4") {
    const ExperimentConfig b = base_2mm();
    std::vector<ExperimentConfig> out = {with(b, SweepMode::averaged, 0, kNarrowStart, kNarrowStop, kNarrowPoints)};
    for (int e : {5, 6, 7}) {
      ExperimentConfig c = with(b, SweepMode::full_quantum, 4, kNarrowStart, kNarrowStop, kQuantumPoints);
      c.trap_freq_s = std::pow(10.0, e);
      // Keep M omega_t, hence the position spread, fixed.
      c.mass_kg = b.mass_kg * b.trap_freq_s / c.trap_freq_s;
      c.series = "wt1e" + std::to_string(e);
      out.push_back(c);
    }
    return out;
  }
  if (name == "d095") {
    ExperimentConfig b = base_3mm();
    b.separation_over_lambda = 0.95;
    b.trap_freq_s = 4e3;
    return curves(b, kD095Start, kD095Stop, {0, 4});
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected fig1, fig2, fig3, fig4 or d095)");
}

void write_csv(std::ostream& out, const std::vector<ExperimentConfig>& configs, const std::vector<Spectrum>& spectra) {
  if (configs.size() != spectra.size()) throw std::invalid_argument("write_csv: one config per spectrum required");
  out << "# arraylight spectrum\n";
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const DerivedParams d = derive_params(configs[k]);
    out << "# series = " << spectra[k].series << '\n';
    out << "# hash = " << config_hash(configs[k]) << '\n';
    std::istringstream lines(serialize(configs[k]));
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind("output", 0) == 0) continue;
      out << "#   " << line << '\n';
    }
    out << "#   derived: eta = " << fmt12(d.eta) << ", sigma_over_lambda = " << fmt12(d.sigma_over_lambda)
        << ", dim = " << d.dim << '\n';
  }
  out << "delta_over_gamma,T,R,loss,series\n";
  for (const auto& s : spectra) {
    for (const auto& r : s.rows) {
      out << fmt12(r.delta_over_gamma) << ',' << fmt12(r.T) << ',' << fmt12(r.R) << ',' << fmt12(r.loss) << ','
          << s.series << '\n';
    }
  }
}

bool any_flagged(const std::vector<Spectrum>& spectra) {
  for (const auto& s : spectra) {
    for (const auto& r : s.rows) {
      if (r.flagged) return true;
    }
  }
  return false;
}

}  // namespace arraylight
