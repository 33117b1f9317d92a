#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace arraylight {

enum class SweepMode { fixed, averaged, full_quantum };

/// One sweep in SI units.  Plain `key = value` text with `#` comments; keys
/// are the field names below.
struct ExperimentConfig {
  std::string geometry = "1d";          ///< 1d | 3d
  int n_atoms = 2;
  int n_max = 0;
  double gamma_hz = 6.283185307179586e7;  ///< decay rate Gamma, s^-1
  double rabi_over_gamma = 1e-4;
  double wavelength_m = 3.1e-3;
  double separation_over_lambda = 0.9;
  double mass_kg = 1.6605e-28;
  double trap_freq_s = 1e3;             ///< omega_t, s^-1
  double detuning_start = 0.0;          ///< units of Gamma
  double detuning_stop = 0.72;
  double detuning_step = 0.01;
  int detuning_points = 0;              ///< > 0 overrides the step (inclusive grid)
  SweepMode mode = SweepMode::fixed;
  int quadrature_order = 15;
  double thermal_nbar = 0.0;
  int dvr_oversample = 16;
  std::string series;                   ///< CSV tag; empty picks a default from the mode
  std::string output;                   ///< CSV path; empty writes to stdout

  std::vector<double> detunings() const;
  std::string series_tag() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parse or validation failure.  line() is 0 for whole-config problems.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Throws ConfigError for out-of-range values.
void validate(const ExperimentConfig& config);

/// Canonical text form; parse_config_string(serialize(c)) == c.
std::string serialize(const ExperimentConfig& config);
/// 64-bit FNV-1a of the canonical form (output path excluded), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(SweepMode mode);

}  // namespace arraylight
