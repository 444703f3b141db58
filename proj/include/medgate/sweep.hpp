#pragma once

// Parameter sweeps and figure-data generation behind the `simulate` CLI.
//
// Configuration is a flat `key = value` text file ('#' starts a comment).
// Values from the file are overridden by MEDGATE_<KEY> environment variables,
// which are in turn overridden by explicit --set key=value flags.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "medgate/core.hpp"

namespace medgate {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  /// 1-based line in the config file; 0 for overrides and cross-key checks.
  int line() const { return line_; }

 private:
  int line_;
};

enum class RunMode { dynamic_map, adiabatic_map, spectrum, cphase_scan, decoherence, interference };

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode mode);

struct Range {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  [[nodiscard]] std::vector<double> values() const;
};

struct RunConfig {
  RunMode mode = RunMode::dynamic_map;

  SystemParams params;
  /// Optional list of R values; each sets E_Q = E_Q' = E_C(R + 1)/2.
  std::vector<double> r_list;

  // J grid for the map modes. "reduced" → J' = 2J/E_C; "absolute" → ps⁻¹.
  std::string grid_units = "reduced";
  Range j1{0.0, 2.0, 21};
  Range j2{0.0, 2.0, 21};
  /// Coupling values along J1 = J2 (decoherence mode); empty → params.j1/j2.
  std::vector<double> j_list;

  int n = 1;

  // Gaussian pulse.
  double omega0 = 0.3;
  double tau = 500.0;
  double pulse_delta = 0.5;
  double window = 5.0;

  // Dynamic-gate π-pulse Rabi frequency.
  double dyn_omega0 = 5.0;

  std::vector<double> gamma0_list{0.0};
  std::string gate = "both";  // decoherence: dynamic | adiabatic | both

  // CPHASE search knob for cphase-scan.
  std::string cphase_knob = "tau";  // tau | delta
  // Adiabatic pulse tuning in decoherence mode over the knob range:
  // none | cphase-tau | cphase-delta | emax-tau | emax-delta.
  std::string adiabatic_tuning = "none";
  Range knob{100.0, 1000.0, 31};
  double phi_tol = 1e-4;

  // Spectrum.
  Range ratio{-5.0, 5.0, 201};
  double spectrum_omega = 0.3;

  // Interference.
  double interference_alpha = std::sqrt(0.5);
  double interference_beta = std::sqrt(0.5);
  int trace_samples = 2001;

  double tol = 1e-10;
  double master_tol = 1e-9;
  long mc_samples = 0;
  /// Required whenever Monte Carlo sampling is requested.
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::filesystem::path out = "out";
};

/// Parses config text. Unknown keys, malformed lines and bad values raise
/// ConfigError carrying the offending line number.
RunConfig parse_config(const std::string& text, RunConfig base = {});

/// Applies one key=value override (line 0 in diagnostics).
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

/// Applies MEDGATE_<KEY> variables for every known key.
void apply_environment(RunConfig& config);

/// Cross-key validation (non-empty grids, positive counts, ...).
void validate(const RunConfig& config);

/// Names of all recognized keys.
std::vector<std::string> known_keys();

/// Every key with its current value, in declaration order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

/// Config file text that parses back to `config`.
std::string format_config(const RunConfig& config);

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  long points = 0;
  long failed_points = 0;
};

/// Runs the configured mode and writes CSV output plus `<mode>.meta.json`.
RunSummary run(const RunConfig& config);

/// Tool version recorded in metadata.
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace medgate
