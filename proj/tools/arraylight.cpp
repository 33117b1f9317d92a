// Command-line front end: sweeps from config files, figure presets, derived
// parameters and a quick analytic self-test.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "arraylight/config.hpp"
#include "arraylight/dvr.hpp"
#include "arraylight/experiment.hpp"
#include "arraylight/liouvillian.hpp"
#include "arraylight/spatial_average.hpp"

namespace al = arraylight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFlagged = 2;

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ARRAYLIGHT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;  // OpenMP default
}

int emit(const std::vector<al::ExperimentConfig>& configs, const std::string& output_override) {
  std::vector<al::Spectrum> spectra;
  for (const auto& c : configs) {
    std::cerr << "[arraylight] " << c.series_tag() << ": " << c.detunings().size() << " points, dim "
              << al::derive_params(c).dim << '\n';
    spectra.push_back(al::run_sweep(c));
  }
  std::string path = output_override;
  if (path.empty() && configs.size() == 1) path = configs.front().output;
  if (path.empty()) {
    al::write_csv(std::cout, configs, spectra);
  } else {
    std::ofstream out(path);
    if (!out) throw al::ConfigError(0, "output", "cannot write '" + path + "'");
    al::write_csv(out, configs, spectra);
  }
  if (al::any_flagged(spectra)) {
    std::cerr << "[arraylight] warning: some points were flagged (non-converged or unphysical)\n";
    return kExitFlagged;
  }
  return kExitOk;
}

struct Check {
  std::string name;
  double error;
  double tolerance;
};

int selftest() {
  std::vector<Check> checks;

  // Single pinned atom against the Lorentzian.
  double worst = 0.0;
  for (double delta : {0.0, 0.25, 0.5, 1.0}) {
    al::ModelParams p = al::waveguide_params({0.0}, 1e-4, delta);
    const al::Observables o = al::fixed_position_observables(p, {al::Vec3::Zero()}, al::FixedMethod::master_equation);
    const double t = 4 * delta * delta / (4 * delta * delta + 1);
    worst = std::max({worst, std::abs(o.T - t), std::abs(o.R - (1 - t))});
  }
  checks.push_back({"single atom T/R vs Lorentzian", worst, 1e-6});

  // Coupled dipoles against the pinned master equation.  The master equation
  // carries O(Omega^2) saturation corrections, so drive at 1e-5.
  worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    al::ModelParams p = al::waveguide_params({0.0, 1.8 * al::kPi}, 1e-5, -0.7 + 0.15 * i);
    const std::vector<al::Vec3> zero(2, al::Vec3::Zero());
    const auto a = al::fixed_position_observables(p, zero, al::FixedMethod::coupled_dipole);
    const auto b = al::fixed_position_observables(p, zero, al::FixedMethod::master_equation);
    worst = std::max({worst, std::abs(a.T - b.T), std::abs(a.R - b.R)});
  }
  checks.push_back({"coupled dipoles vs master equation", worst, 1e-8});

  // Superradiant width at d = 0.9 lambda.
  al::ModelParams p2 = al::waveguide_params({0.0, 1.8 * al::kPi}, 1e-4, 0.0);
  const auto rep = al::sudden_validity_check(p2);
  checks.push_back({"collective widths 1 +- cos(1.8 pi)", std::abs(rep.widths.back() - (1 + std::cos(1.8 * al::kPi))),
                    1e-12});

  // DVR Debye-Waller factor.
  const auto grid = al::DvrGrid::build(al::position_matrix(12, 0.056));
  const auto e = al::matrix_elements(grid, [](double x) { return std::exp(al::kI * x); });
  checks.push_back({"DVR <0|exp(ikx)|0> = exp(-eta^2/2)", std::abs(e(0, 0) - std::exp(-0.056 * 0.056 / 2)), 1e-10});

  bool ok = true;
  for (const auto& c : checks) {
    const bool pass = c.error <= c.tolerance;
    ok = ok && pass;
    std::cout << (pass ? "PASS  " : "FAIL  ") << c.name << "  (error " << c.error << ", tol " << c.tolerance << ")\n";
  }
  return ok ? kExitOk : kExitFlagged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission and reflection of weak light through trapped atoms in a waveguide"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("-t,--threads", threads, "Worker threads (fallback: ARRAYLIGHT_THREADS)");

  auto* sweep = app.add_subcommand("sweep", "Run the sweep described by a config file");
  std::string config_path, output;
  sweep->add_option("config", config_path, "key = value config file")->required();
  sweep->add_option("-o,--output", output, "CSV path (overrides the config)");

  auto* pre = app.add_subcommand("preset", "Reproduce a named figure");
  std::string preset_name;
  pre->add_option("name", preset_name, "fig1 | fig2 | fig3 | fig4 | d095")
      ->required()
      ->check(CLI::IsMember(al::preset_names()));
  pre->add_option("-o,--output", output, "CSV path (default: stdout)");

  auto* derive = app.add_subcommand("derive", "Print derived dimensionless parameters");
  std::string derive_config, derive_preset;
  derive->add_option("config", derive_config, "key = value config file");
  derive->add_option("-p,--preset", derive_preset, "use a preset instead of a config file")
      ->check(CLI::IsMember(al::preset_names()));

  app.add_subcommand("selftest", "Run the analytic oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (const int n = resolve_threads(threads); n > 0) omp_set_num_threads(n);

  try {
    if (*sweep) return emit({al::load_config(config_path)}, output);
    if (*pre) return emit(al::preset(preset_name), output);
    if (*derive) {
      std::vector<al::ExperimentConfig> configs;
      if (!derive_preset.empty()) {
        configs = al::preset(derive_preset);
      } else if (!derive_config.empty()) {
        configs = {al::load_config(derive_config)};
      } else {
        throw al::ConfigError(0, "", "derive needs a config file or --preset");
      }
      for (const auto& c : configs) {
        std::cout << "# " << c.series_tag() << "  hash = " << al::config_hash(c) << '\n'
                  << al::format_derived(al::derive_params(c));
      }
      return kExitOk;
    }
    return selftest();
  } catch (const al::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFlagged;
  }
}
