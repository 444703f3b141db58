#include "medgate/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "medgate/adiabatic_gate.hpp"
#include "medgate/dynamic_gate.hpp"
#include "medgate/entangling_power.hpp"
#include "medgate/open_system.hpp"
#include "medgate/parallel.hpp"

namespace medgate {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value))
    throw std::invalid_argument("expected a finite number, got '" + std::string(text) + "'");
  return value;
}

template <class Int>
Int to_integer(std::string_view text) {
  text = trim(text);
  Int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
  return value;
}

std::vector<double> to_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(to_double(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

KeySpec real_key(const char* name, double RunConfig::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.*field = to_double(v); },
          [field](const RunConfig& c) { return fmt(c.*field); }};
}

KeySpec param_key(const char* name, double SystemParams::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.params.*field = to_double(v); },
          [field](const RunConfig& c) { return fmt(c.params.*field); }};
}

KeySpec list_key(const char* name, std::vector<double> RunConfig::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.*field = to_list(v); },
          [field](const RunConfig& c) { return join(c.*field); }};
}

void range_keys(std::vector<KeySpec>& keys, const char* prefix, Range RunConfig::*field) {
  const std::string p(prefix);
  keys.push_back({p + "_min",
                  [field](RunConfig& c, std::string_view v) { (c.*field).min = to_double(v); },
                  [field](const RunConfig& c) { return fmt((c.*field).min); }});
  keys.push_back({p + "_max",
                  [field](RunConfig& c, std::string_view v) { (c.*field).max = to_double(v); },
                  [field](const RunConfig& c) { return fmt((c.*field).max); }});
  keys.push_back(
      {p + "_count",
       [field](RunConfig& c, std::string_view v) { (c.*field).count = to_integer<int>(v); },
       [field](const RunConfig& c) { return std::to_string((c.*field).count); }});
}

KeySpec choice_key(const char* name, std::string RunConfig::*field,
                   std::initializer_list<const char*> allowed) {
  std::vector<const char*> options(allowed);
  return {name,
          [field, options](RunConfig& c, std::string_view v) {
            const std::string value(trim(v));
            if (std::find_if(options.begin(), options.end(),
                             [&](const char* o) { return value == o; }) == options.end()) {
              std::string list;
              for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
              throw std::invalid_argument("'" + value + "' is not one of: " + list);
            }
            c.*field = value;
          },
          [field](const RunConfig& c) { return c.*field; }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> k;
    k.push_back({"mode", [](RunConfig& c, std::string_view v) { c.mode = parse_mode(std::string(trim(v))); },
                 [](const RunConfig& c) { return mode_name(c.mode); }});
    k.push_back(param_key("e_q", &SystemParams::e_q));
    k.push_back(param_key("e_c", &SystemParams::e_c));
    k.push_back(param_key("e_qp", &SystemParams::e_qp));
    k.push_back(param_key("j1", &SystemParams::j1));
    k.push_back(param_key("j2", &SystemParams::j2));
    k.push_back(param_key("alpha", &SystemParams::alpha));
    k.push_back(param_key("delta", &SystemParams::delta));
    k.push_back(list_key("r_list", &RunConfig::r_list));
    k.push_back(choice_key("grid_units", &RunConfig::grid_units, {"reduced", "absolute"}));
    range_keys(k, "j1", &RunConfig::j1);
    range_keys(k, "j2", &RunConfig::j2);
    k.push_back(list_key("j_list", &RunConfig::j_list));
    k.push_back({"n", [](RunConfig& c, std::string_view v) { c.n = to_integer<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.n); }});
    k.push_back(real_key("omega0", &RunConfig::omega0));
    k.push_back(real_key("tau", &RunConfig::tau));
    k.push_back(real_key("pulse_delta", &RunConfig::pulse_delta));
    k.push_back(real_key("window", &RunConfig::window));
    k.push_back(real_key("dyn_omega0", &RunConfig::dyn_omega0));
    k.push_back(list_key("gamma0_list", &RunConfig::gamma0_list));
    k.push_back(choice_key("gate", &RunConfig::gate, {"dynamic", "adiabatic", "both"}));
    k.push_back(choice_key("cphase_knob", &RunConfig::cphase_knob, {"tau", "delta"}));
    k.push_back(choice_key("adiabatic_tuning", &RunConfig::adiabatic_tuning,
                           {"none", "cphase-tau", "cphase-delta", "emax-tau", "emax-delta"}));
    range_keys(k, "knob", &RunConfig::knob);
    k.push_back(real_key("phi_tol", &RunConfig::phi_tol));
    range_keys(k, "ratio", &RunConfig::ratio);
    k.push_back(real_key("spectrum_omega", &RunConfig::spectrum_omega));
    k.push_back(real_key("interference_alpha", &RunConfig::interference_alpha));
    k.push_back(real_key("interference_beta", &RunConfig::interference_beta));
    k.push_back({"trace_samples",
                 [](RunConfig& c, std::string_view v) { c.trace_samples = to_integer<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.trace_samples); }});
    k.push_back(real_key("tol", &RunConfig::tol));
    k.push_back(real_key("master_tol", &RunConfig::master_tol));
    k.push_back({"mc_samples",
                 [](RunConfig& c, std::string_view v) { c.mc_samples = to_integer<long>(v); },
                 [](const RunConfig& c) { return std::to_string(c.mc_samples); }});
    k.push_back({"seed",
                 [](RunConfig& c, std::string_view v) {
                   if (trim(v).empty()) c.seed.reset();
                   else c.seed = to_integer<std::uint64_t>(v);
                 },
                 [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : ""; }});
    k.push_back({"threads", [](RunConfig& c, std::string_view v) { c.threads = to_integer<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.threads); }});
    k.push_back({"out", [](RunConfig& c, std::string_view v) { c.out = std::string(trim(v)); },
                 [](const RunConfig& c) { return c.out.string(); }});
    return k;
  }();
  return table;
}

void set_key(RunConfig& config, std::string_view key, std::string_view value, int line) {
  const auto& table = key_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const KeySpec& k) { return key == k.name; });
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'", line);
  try {
    it->set(config, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what(), line);
  }
}

// ---------------------------------------------------------------------------
// Output helpers

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  CsvWriter& operator<<(double x) { return field(fmt(x)); }
  CsvWriter& operator<<(const std::string& s) { return field(s); }
  CsvWriter& operator<<(int x) { return field(std::to_string(x)); }
  CsvWriter& operator<<(bool b) { return field(b ? "true" : "false"); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& field(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }

  std::ofstream out_;
  bool first_ = true;
};

std::string basis_label(int flat) {
  const BasisIndex b = BasisIndex::from_flat(flat);
  std::string s = b.orbital == 0 ? "g" : "e";
  s += static_cast<char>('0' + b.spin_q);
  s += static_cast<char>('0' + b.spin_c);
  s += static_cast<char>('0' + b.spin_qp);
  return s;
}

std::vector<SystemParams> ratio_variants(const RunConfig& c) {
  if (c.r_list.empty()) return {c.params};
  std::vector<SystemParams> out;
  for (double r : c.r_list) {
    SystemParams p = c.params;
    p.e_q = p.e_qp = 0.5 * p.e_c * (r + 1.0);
    out.push_back(p);
  }
  return out;
}

PulseProfile template_pulse(const RunConfig& c) {
  return PulseProfile::gaussian(c.omega0, c.tau, c.pulse_delta, c.window);
}

// e(U) of a gate whose leakage is within threshold, evaluated on the closest
// unitary so that small residual leakage does not reject the closed form.
double gate_entangling_power(const LogicalGate& gate) {
  LogicalGate projected{nearest_unitary(gate.matrix), 0.0};
  return entangling_power_closed(projected);
}

struct MapPoint {
  SystemParams params;
  double r = 0.0;
  double j1_reduced = 0.0;
  double j2_reduced = 0.0;
};

std::vector<MapPoint> map_grid(const RunConfig& c) {
  std::vector<MapPoint> grid;
  const std::vector<double> j1s = c.j1.values();
  const std::vector<double> j2s = c.j2.values();
  for (const SystemParams& base : ratio_variants(c)) {
    for (double a : j1s) {
      for (double b : j2s) {
        MapPoint m;
        m.params = base;
        if (c.grid_units == "reduced") {
          m.params.j1 = 0.5 * base.e_c * a;
          m.params.j2 = 0.5 * base.e_c * b;
        } else {
          m.params.j1 = a;
          m.params.j2 = b;
        }
        m.r = base.e_c != 0.0 ? base.ratio() : kNaN;
        m.j1_reduced = base.e_c != 0.0 ? m.params.j1_reduced() : kNaN;
        m.j2_reduced = base.e_c != 0.0 ? m.params.j2_reduced() : kNaN;
        grid.push_back(m);
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Modes

void run_dynamic_map(const RunConfig& c, RunSummary& summary) {
  struct Row {
    double t_rev = kNaN, eu = kNaN, eu_mc = kNaN, eu_mc_err = kNaN, leakage = kNaN;
    bool valid = false;
  };
  const std::vector<MapPoint> grid = map_grid(c);
  std::vector<Row> rows(grid.size());
  parallel_for(grid.size(), c.threads, [&](std::size_t i) {
    try {
      const SystemParams& p = grid[i].params;
      Row row;
      row.t_rev = revival_time(p, c.n);
      const LogicalGate gate = dynamic_unitary(p, c.n);
      row.leakage = gate.leakage;
      row.eu = entangling_power_closed(gate);
      if (c.mc_samples > 0) {
        const EntanglingPowerEstimate mc = entangling_power_mc(gate, c.mc_samples, mix_seed(*c.seed, i));
        row.eu_mc = mc.value;
        row.eu_mc_err = mc.stderr_;
      }
      row.valid = true;
      rows[i] = row;
    } catch (const std::exception&) {
      rows[i] = Row{};
    }
  });

  const auto path = c.out / "dynamic-map.csv";
  CsvWriter csv(path, {"R", "n", "J1r", "J2r", "J1", "J2", "t_rev", "eU", "eU_mc", "eU_mc_stderr",
                       "leakage", "valid"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MapPoint& m = grid[i];
    const Row& r = rows[i];
    csv << m.r << c.n << m.j1_reduced << m.j2_reduced << m.params.j1 << m.params.j2 << r.t_rev
        << r.eu << r.eu_mc << r.eu_mc_err << r.leakage << r.valid;
    csv.end_row();
    summary.failed_points += r.valid ? 0 : 1;
  }
  summary.points += static_cast<long>(grid.size());
  summary.outputs.push_back(path);
}

void run_adiabatic_map(const RunConfig& c, RunSummary& summary) {
  struct Row {
    double eu = kNaN, leakage = kNaN, phi = kNaN, offdiag = kNaN;
    bool valid = false;
  };
  const std::vector<MapPoint> grid = map_grid(c);
  const PulseProfile pulse = template_pulse(c);
  std::vector<Row> rows(grid.size());
  parallel_for(grid.size(), c.threads, [&](std::size_t i) {
    Row row;
    try {
      const AdiabaticGateResult result = adiabatic_gate(grid[i].params, pulse, c.tol);
      row.leakage = result.gate.leakage;
      if (result.valid) {
        const CphaseReport report = cphase_report(result.gate);
        row.phi = report.phi;
        row.offdiag = report.offdiag_norm;
        row.eu = gate_entangling_power(result.gate);
        row.valid = true;
      }
    } catch (const std::exception&) {
      row.valid = false;
    }
    rows[i] = row;
  });

  const auto path = c.out / "adiabatic-map.csv";
  CsvWriter csv(path, {"R", "J1r", "J2r", "J1", "J2", "eU", "leakage", "phi", "offdiag", "valid"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MapPoint& m = grid[i];
    const Row& r = rows[i];
    csv << m.r << m.j1_reduced << m.j2_reduced << m.params.j1 << m.params.j2 << r.eu << r.leakage
        << r.phi << r.offdiag << r.valid;
    csv.end_row();
    // Leakage above threshold is a physical outcome, not a numerical failure.
    summary.failed_points += std::isnan(r.leakage) ? 1 : 0;
  }
  summary.points += static_cast<long>(grid.size());
  summary.outputs.push_back(path);
}

void run_spectrum(const RunConfig& c, RunSummary& summary) {
  const std::vector<double> ratios = c.ratio.values();
  SystemParams p = c.params;
  const Eigenspectrum spec = eigenspectrum(p, c.spectrum_omega, ratios);

  const auto path = c.out / "spectrum.csv";
  CsvWriter csv(path, {"ratio", "delta", "curve", "label", "energy", "ambiguous"});
  for (std::size_t k = 0; k < spec.ratios.size(); ++k) {
    const bool ambiguous = std::find(spec.ambiguous_points.begin(), spec.ambiguous_points.end(),
                                     static_cast<int>(k)) != spec.ambiguous_points.end();
    for (int curve = 0; curve < 16; ++curve) {
      csv << spec.ratios[k] << spec.ratios[k] * c.spectrum_omega << curve
          << basis_label(spec.labels[curve]) << spec.energies[k][curve] << ambiguous;
      csv.end_row();
    }
  }
  summary.points += static_cast<long>(spec.ratios.size());
  summary.outputs.push_back(path);
}

PulseKnob knob_of(const std::string& name) {
  return name == "delta" ? PulseKnob::delta : PulseKnob::tau;
}

void run_cphase_scan(const RunConfig& c, RunSummary& summary) {
  const CphaseSearchResult result =
      find_cphase(c.params, template_pulse(c), knob_of(c.cphase_knob), c.knob.min, c.knob.max,
                  c.knob.count, c.phi_tol, c.tol);

  const auto trace_path = c.out / "cphase-scan.csv";
  {
    CsvWriter csv(trace_path, {"knob", "value", "phi_unwrapped", "leakage"});
    for (const auto& t : result.trace) {
      csv << c.cphase_knob << t[0] << t[1] << t[2];
      csv.end_row();
    }
  }
  const auto result_path = c.out / "cphase-result.csv";
  {
    CsvWriter csv(result_path,
                  {"knob", "found", "value", "phi", "offdiag", "eU", "leakage", "message"});
    double eu = kNaN;
    if (result.found) {
      try {
        eu = gate_entangling_power(result.gate);
      } catch (const std::exception&) {
      }
    }
    std::string message = result.message;
    std::replace(message.begin(), message.end(), ',', ';');
    csv << c.cphase_knob << result.found << result.value
        << (result.found ? result.report.phi : kNaN)
        << (result.found ? result.report.offdiag_norm : kNaN) << eu
        << (result.found ? result.gate.leakage : kNaN) << message;
    csv.end_row();
  }
  summary.points += static_cast<long>(result.trace.size());
  for (const auto& t : result.trace) summary.failed_points += std::isnan(t[1]) ? 1 : 0;
  summary.outputs.push_back(trace_path);
  summary.outputs.push_back(result_path);
}

// Pulse for the adiabatic gate after the requested tuning. Throws if the
// search finds no usable pulse.
PulseProfile tuned_pulse(const RunConfig& c, const SystemParams& p) {
  const PulseProfile pulse = template_pulse(c);
  const std::string& t = c.adiabatic_tuning;
  if (t == "none") return pulse;
  const PulseKnob knob = t.ends_with("tau") ? PulseKnob::tau : PulseKnob::delta;
  if (t.starts_with("cphase")) {
    const CphaseSearchResult match =
        find_cphase(p, pulse, knob, c.knob.min, c.knob.max, c.knob.count, c.phi_tol, c.tol);
    if (!match.found) throw std::runtime_error(match.message);
    return match.pulse;
  }
  const EntanglerSearchResult best =
      maximize_entangling_power(p, pulse, knob, c.knob.min, c.knob.max, c.knob.count, c.tol);
  if (!best.found) throw std::runtime_error(best.message);
  return best.pulse;
}

void run_decoherence(const RunConfig& c, RunSummary& summary) {
  std::vector<std::pair<double, double>> couplings;
  if (c.j_list.empty()) couplings.emplace_back(c.params.j1, c.params.j2);
  for (double j : c.j_list) couplings.emplace_back(j, j);

  std::vector<std::string> gates;
  if (c.gate != "adiabatic") gates.emplace_back("dynamic");
  if (c.gate != "dynamic") gates.emplace_back("adiabatic");

  const auto path = c.out / "decoherence.csv";
  CsvWriter csv(path, {"gate", "J1", "J2", "tau", "pulse_delta", "eU", "gate_leakage", "gamma0",
                       "input", "purity", "population", "valid"});
  static const char* kInputs[] = {"00", "01", "10", "11"};

  for (const std::string& gate_name : gates) {
    for (const auto& [j1, j2] : couplings) {
      SystemParams p = c.params;
      p.j1 = j1;
      p.j2 = j2;
      std::vector<DecoherenceRow> rows;
      PulseProfile pulse = template_pulse(c);
      bool ok = true;
      double eu = kNaN, gate_leakage = kNaN;
      try {
        GateSpec spec;
        LogicalGate closed;
        if (gate_name == "dynamic") {
          spec = DynamicGateSpec{p, c.dyn_omega0, c.n};
          closed = simulate_pulsed_gate(p, c.dyn_omega0, c.n);
        } else {
          pulse = tuned_pulse(c, p);
          spec = AdiabaticGateSpec{p, pulse};
          closed = adiabatic_gate(p, pulse, c.tol).gate;
        }
        gate_leakage = closed.leakage;
        eu = gate_entangling_power(closed);
        rows = decoherence_study(spec, c.gamma0_list, c.master_tol, c.threads);
      } catch (const std::exception&) {
        ok = false;
      }
      const bool adiabatic = gate_name == "adiabatic";
      for (std::size_t g = 0; g < c.gamma0_list.size(); ++g) {
        for (int input = 0; input < 5; ++input) {
          const FiguresOfMerit f = !ok ? FiguresOfMerit{kNaN, kNaN}
                                   : input < 4 ? rows[g].per_input[input]
                                               : rows[g].mean;
          csv << gate_name << j1 << j2 << (adiabatic ? pulse.tau : kNaN)
              << (adiabatic ? pulse.delta : kNaN) << eu << gate_leakage << c.gamma0_list[g]
              << std::string(input < 4 ? kInputs[input] : "mean") << f.purity
              << f.population_computational << ok;
          csv.end_row();
        }
        summary.points += 1;
        summary.failed_points += ok ? 0 : 1;
      }
    }
  }
  summary.outputs.push_back(path);
}

void run_interference(const RunConfig& c, RunSummary& summary) {
  const PulseProfile pulse = template_pulse(c);
  const InterferenceTrace trace =
      interference_trace(c.params, pulse, c.interference_alpha, c.interference_beta,
                         c.trace_samples, c.tol);
  const auto path = c.out / "interference.csv";
  {
    CsvWriter csv(path, {"t", "omega", "pop_100", "pop_001"});
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
      csv << trace.times[k] << pulse.rabi(trace.times[k]) << trace.pop_100[k] << trace.pop_001[k];
      csv.end_row();
    }
  }
  const auto summary_path = c.out / "interference-summary.csv";
  {
    CsvWriter csv(summary_path, {"measured_period", "predicted_period", "final_pop_100",
                                 "final_pop_001"});
    const std::optional<double> measured = measured_period_near_peak(trace, 0.5 * c.tau);
    const double gap = interference_gap(c.params, c.omega0, c.pulse_delta);
    csv << measured.value_or(kNaN) << 2.0 * std::numbers::pi / gap << trace.pop_100.back()
        << trace.pop_001.back();
    csv.end_row();
  }
  summary.points += static_cast<long>(trace.times.size());
  summary.outputs.push_back(path);
  summary.outputs.push_back(summary_path);
}

}  // namespace

RunMode parse_mode(const std::string& name) {
  if (name == "dynamic-map") return RunMode::dynamic_map;
  if (name == "adiabatic-map") return RunMode::adiabatic_map;
  if (name == "spectrum") return RunMode::spectrum;
  if (name == "cphase-scan") return RunMode::cphase_scan;
  if (name == "decoherence") return RunMode::decoherence;
  if (name == "interference") return RunMode::interference;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::dynamic_map: return "dynamic-map";
    case RunMode::adiabatic_map: return "adiabatic-map";
    case RunMode::spectrum: return "spectrum";
    case RunMode::cphase_scan: return "cphase-scan";
    case RunMode::decoherence: return "decoherence";
    case RunMode::interference: return "interference";
  }
  return "unknown";
}

std::vector<double> Range::values() const {
  if (count < 1) throw std::invalid_argument("range count must be at least 1");
  if (count == 1) return {min};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = min + (max - min) * i / (count - 1);
  return out;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view view(raw);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
    const std::string_view key = trim(view.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    set_key(base, key, view.substr(eq + 1), line);
  }
  return base;
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  set_key(config, trim(key), value, 0);
}

void apply_environment(RunConfig& config) {
  for (const KeySpec& k : key_table()) {
    std::string var = "MEDGATE_";
    for (char ch : k.name) var += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* value = std::getenv(var.c_str())) {
      try {
        k.set(config, value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(var + ": " + e.what());
      }
    }
  }
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  for (const auto& [name, range] :
       {std::pair{"j1", c.j1}, std::pair{"j2", c.j2}, std::pair{"knob", c.knob},
        std::pair{"ratio", c.ratio}})
    require(range.count >= 1, std::string(name) + "_count must be at least 1");
  require(c.n >= 1, "n must be at least 1");
  require(c.threads >= 1, "threads must be at least 1");
  require(c.tol > 0.0 && c.master_tol > 0.0, "tolerances must be positive");
  require(c.mc_samples >= 0, "mc_samples must be non-negative");
  require(c.mc_samples == 0 || c.mc_samples >= 2, "mc_samples must be 0 or at least 2");
  require(c.mc_samples == 0 || c.seed.has_value(), "a seed is required when mc_samples > 0");
  require(c.phi_tol > 0.0, "phi_tol must be positive");
  require(c.trace_samples >= 2, "trace_samples must be at least 2");
  require(c.window > 0.0, "window must be positive");

  const bool pulsed = c.mode == RunMode::adiabatic_map || c.mode == RunMode::cphase_scan ||
                      c.mode == RunMode::interference ||
                      (c.mode == RunMode::decoherence && c.gate != "dynamic");
  if (pulsed) require(c.tau > 0.0, "tau must be positive");
  if (!c.r_list.empty() || c.grid_units == "reduced")
    require(c.params.e_c != 0.0, "e_c must be nonzero for reduced units or r_list");
  if (c.mode == RunMode::decoherence) {
    require(!c.gamma0_list.empty(), "gamma0_list must not be empty");
    for (double g : c.gamma0_list) require(g >= 0.0, "gamma0_list entries must be non-negative");
    require(c.dyn_omega0 > 0.0, "dyn_omega0 must be positive");
  }
  if (c.mode == RunMode::cphase_scan || c.adiabatic_tuning != "none")
    require(c.knob.count >= 2 && c.knob.max > c.knob.min, "knob range must have knob_max > knob_min and knob_count >= 2");
  if (c.mode == RunMode::interference)
    require(std::abs(c.interference_alpha) + std::abs(c.interference_beta) > 0.0,
            "interference amplitudes must not both be zero");
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const KeySpec& k : key_table()) out.emplace_back(k.name);
  return out;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const KeySpec& k : key_table()) out.emplace_back(k.name, k.get(config));
  return out;
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_entries(config)) out += key + " = " + value + "\n";
  return out;
}

RunSummary run(const RunConfig& config) {
  validate(config);
  std::filesystem::create_directories(config.out);

  RunSummary summary;
  switch (config.mode) {
    case RunMode::dynamic_map: run_dynamic_map(config, summary); break;
    case RunMode::adiabatic_map: run_adiabatic_map(config, summary); break;
    case RunMode::spectrum: run_spectrum(config, summary); break;
    case RunMode::cphase_scan: run_cphase_scan(config, summary); break;
    case RunMode::decoherence: run_decoherence(config, summary); break;
    case RunMode::interference: run_interference(config, summary); break;
  }

  nlohmann::ordered_json meta;
  meta["tool"] = "simulate";
  meta["version"] = kToolVersion;
  meta["mode"] = mode_name(config.mode);
  meta["seed"] = config.seed ? nlohmann::ordered_json(*config.seed) : nlohmann::ordered_json();
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config_entries(config)) entries[key] = value;
  meta["config"] = entries;
  meta["points"] = summary.points;
  meta["failed_points"] = summary.failed_points;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& p : summary.outputs) outputs.push_back(p.filename().string());
  meta["outputs"] = outputs;

  const auto meta_path = config.out / (mode_name(config.mode) + ".meta.json");
  std::ofstream(meta_path, std::ios::binary) << meta.dump(2) << '\n';
  summary.outputs.push_back(meta_path);
  return summary;
}

}  // namespace medgate
