#include "arraylight/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace arraylight {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& text, int line, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) throw ConfigError(line, key, "expected a number, got '" + text + "'");
  return v;
}

int to_int(const std::string& text, int line, const std::string& key) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError(line, key, "expected an integer, got '" + text + "'");
  return v;
}

SweepMode to_mode(const std::string& text, int line) {
  if (text == "fixed") return SweepMode::fixed;
  if (text == "averaged") return SweepMode::averaged;
  if (text == "full-quantum" || text == "full") return SweepMode::full_quantum;
  throw ConfigError(line, "mode", "expected fixed | averaged | full-quantum, got '" + text + "'");
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&, int)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define AL_DOUBLE(name)                                                                             \
  Field {                                                                                           \
    #name, [](ExperimentConfig& c, const std::string& v, int l) { c.name = to_double(v, l, #name); }, \
        [](const ExperimentConfig& c) { return format_double(c.name); }                              \
  }
#define AL_INT(name)                                                                             \
  Field {                                                                                        \
    #name, [](ExperimentConfig& c, const std::string& v, int l) { c.name = to_int(v, l, #name); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.name); }                          \
  }
#define AL_STRING(name)                                                               \
  Field {                                                                             \
    #name, [](ExperimentConfig& c, const std::string& v, int) { c.name = v; },        \
        [](const ExperimentConfig& c) { return c.name; }                               \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      AL_STRING(geometry),
      AL_INT(n_atoms),
      AL_INT(n_max),
      AL_DOUBLE(gamma_hz),
      AL_DOUBLE(rabi_over_gamma),
      AL_DOUBLE(wavelength_m),
      AL_DOUBLE(separation_over_lambda),
      AL_DOUBLE(mass_kg),
      AL_DOUBLE(trap_freq_s),
      AL_DOUBLE(detuning_start),
      AL_DOUBLE(detuning_stop),
      AL_DOUBLE(detuning_step),
      AL_INT(detuning_points),
      Field{"mode", [](ExperimentConfig& c, const std::string& v, int l) { c.mode = to_mode(v, l); },
            [](const ExperimentConfig& c) { return to_string(c.mode); }},
      AL_INT(quadrature_order),
      AL_DOUBLE(thermal_nbar),
      AL_INT(dvr_oversample),
      AL_STRING(series),
      AL_STRING(output),
  };
  return f;
}

#undef AL_DOUBLE
#undef AL_INT
#undef AL_STRING

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::fixed:
      return "fixed";
    case SweepMode::averaged:
      return "averaged";
    case SweepMode::full_quantum:
      return "full-quantum";
  }
  return "fixed";
}

std::vector<double> ExperimentConfig::detunings() const {
  std::vector<double> d;
  if (detuning_points > 0) {
    if (detuning_points == 1) return {detuning_start};
    const double h = (detuning_stop - detuning_start) / (detuning_points - 1);
    for (int i = 0; i < detuning_points; ++i) d.push_back(detuning_start + i * h);
    d.back() = detuning_stop;
    return d;
  }
  const auto n = static_cast<long>(std::floor((detuning_stop - detuning_start) / detuning_step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) d.push_back(detuning_start + static_cast<double>(i) * detuning_step);
  return d;
}

std::string ExperimentConfig::series_tag() const {
  if (!series.empty()) return series;
  switch (mode) {
    case SweepMode::fixed:
      return "fixed";
    case SweepMode::averaged:
      return "averaged";
    case SweepMode::full_quantum:
      return "nmax" + std::to_string(n_max);
  }
  return "fixed";
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    bool known = false;
    for (const auto& f : fields()) {
      if (key == f.key) {
        if (seen.count(key)) throw ConfigError(line, key, "duplicate key (first set on line " + std::to_string(seen[key]) + ")");
        f.set(c, value, line);
        seen[key] = line;
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(line, key, "unknown key");
  }
  try {
    validate(c);
  } catch (const ConfigError& e) {
    // Point at the line that set the offending field, when there is one.
    const auto it = seen.find(e.field());
    if (it == seen.end()) throw;
    const std::string msg = std::string(e.what()).substr(e.field().size() + 2);
    throw ConfigError(it->second, e.field(), msg);
  }
  return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file '" + path + "'");
  return parse_config(in);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* field, const char* msg) {
    if (!ok) throw ConfigError(0, field, msg);
  };
  require(c.geometry == "1d" || c.geometry == "3d", "geometry", "expected 1d or 3d");
  require(c.n_atoms >= 1 && c.n_atoms <= 8, "n_atoms", "must be in [1, 8]");
  require(c.n_max >= 0 && c.n_max <= 12, "n_max", "must be in [0, 12]");
  require(c.gamma_hz > 0.0, "gamma_hz", "must be > 0");
  require(c.rabi_over_gamma > 0.0, "rabi_over_gamma", "must be > 0");
  require(c.wavelength_m > 0.0, "wavelength_m", "must be > 0");
  require(c.separation_over_lambda > 0.0, "separation_over_lambda", "must be > 0");
  require(c.mass_kg > 0.0, "mass_kg", "must be > 0");
  require(c.trap_freq_s > 0.0, "trap_freq_s", "must be > 0");
  require(c.detuning_stop >= c.detuning_start, "detuning_stop", "must be >= detuning_start");
  require(c.detuning_points >= 0, "detuning_points", "must be >= 0");
  require(c.detuning_points > 0 || c.detuning_step > 0.0, "detuning_step", "must be > 0");
  require(c.quadrature_order >= 1, "quadrature_order", "must be >= 1");
  require(c.thermal_nbar >= 0.0, "thermal_nbar", "must be >= 0");
  require(c.dvr_oversample >= 0, "dvr_oversample", "must be >= 0");
  require(c.series.find_first_of(",\n") == std::string::npos, "series", "must not contain commas or newlines");
}

std::string serialize(const ExperimentConfig& config) {
  std::ostringstream os;
  for (const auto& f : fields()) os << f.key << " = " << f.get(config) << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
  // The output path is not a physical parameter.
  ExperimentConfig c = config;
  c.output.clear();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace arraylight
