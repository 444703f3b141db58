#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "medgate/core.hpp"
#include "medgate/integrator.hpp"
#include "medgate/pulse.hpp"

namespace medgate {

/// Leakage above which a gate's entangling power is treated as undefined.
inline constexpr double kLeakageThreshold = 1e-3;

/// Landau–Zener adiabaticity measure (Ω̇Δ − ΩΔ̇) / (2(Δ² + Ω²)^{3/2}) at time t,
/// returned as a magnitude. Δ is constant for PulseProfile, so Δ̇ = 0.
double adiabaticity_metric(const PulseProfile& pulse, double t);

/// Maximum of adiabaticity_metric over the pulse window (dense sampling
/// followed by golden-section refinement around the best sample).
double max_adiabaticity_metric(const PulseProfile& pulse);

/// Propagator over the pulse window for the Hamiltonian with Ω(t) from the
/// pulse and Δ = pulse.delta. Rectangular pulses use one exact exponential;
/// Gaussian pulses use the adaptive Magnus integrator with local tolerance
/// `tol`. Throws IntegrationError on step underflow.
Op16 propagate_pulse(const SystemParams& params, const PulseProfile& pulse, double tol = 1e-10);

/// Same as propagate_pulse but left-multiplied onto `initial` and over
/// [t0, t1] inside the pulse window.
Op16 propagate_pulse_interval(const SystemParams& params, const PulseProfile& pulse, double t0,
                              double t1, double tol, const Op16& initial = Op16::Identity());

/// Propagator of a pulse sequence.
Op16 propagate_schedule(const SystemParams& params, const PulseSchedule& schedule,
                        double tol = 1e-10);

/// Logical 4×4 block of a 16-dimensional propagator: orbital |g⟩ and control
/// |0⟩ held fixed, rows/columns |00⟩,|01⟩,|10⟩,|11⟩.
LogicalGate extract_logical_gate(const Op16& u);

/// Gate for one Gaussian pulse, plus a validity flag (leakage ≤ threshold).
struct AdiabaticGateResult {
  LogicalGate gate;
  bool valid = false;
};
AdiabaticGateResult adiabatic_gate(const SystemParams& params, const PulseProfile& pulse,
                                   double tol = 1e-10);

struct CphaseReport {
  /// φ00 − φ01 − φ10 + φ11 reduced to (−π, π].
  double phi = 0.0;
  /// |U12| + |U21|.
  double offdiag_norm = 0.0;
  std::array<double, 4> phases{};
  /// offdiag_norm ≤ 0.1.
  bool diagonal = true;
};

/// Throws std::invalid_argument if leakage exceeds kLeakageThreshold.
CphaseReport cphase_report(const LogicalGate& gate);

/// Pulse parameter varied by a CPHASE search.
enum class PulseKnob { tau, delta };

struct CphaseSearchResult {
  bool found = false;
  double value = 0.0;  // τ* (ps) or Δ* (ps⁻¹)
  PulseProfile pulse;
  LogicalGate gate;
  CphaseReport report;
  /// Scan trace: knob value, unwrapped φ, leakage.
  std::vector<std::array<double, 3>> trace;
  std::string message;
};

/// Scans the knob over [lo, hi] on `samples` points, tracking φ continuously,
/// and bisects the first crossing of an odd multiple of π down to |φ − π|
/// (mod 2π) < phi_tol. Points with leakage above threshold break the
/// continuity chain and are skipped.
CphaseSearchResult find_cphase(const SystemParams& params, const PulseProfile& pulse_template,
                               PulseKnob knob, double lo, double hi, int samples = 31,
                               double phi_tol = 1e-4, double tol = 1e-10);

/// find_cphase over the Gaussian width.
CphaseSearchResult find_cphase_tau(const SystemParams& params, const PulseProfile& pulse_template,
                                   double tau_lo, double tau_hi, int samples = 31,
                                   double phi_tol = 1e-4, double tol = 1e-10);

struct EntanglerSearchResult {
  bool found = false;
  double value = 0.0;
  double entangling_power = -1.0;
  PulseProfile pulse;
  LogicalGate gate;
  std::string message;
};

/// Local maximum of e(U) over the knob in [lo, hi]. The range is scanned on
/// `samples` points; among sampled local maxima within `slack` of the best
/// sample, the one with the weakest optical excitation is kept (largest Δ for
/// the detuning knob, smallest τ for the width knob) and refined by golden
/// section search. Gates above the leakage threshold are excluded; e(U) is
/// evaluated on the closest unitary to the extracted block.
EntanglerSearchResult maximize_entangling_power(const SystemParams& params,
                                                const PulseProfile& pulse_template,
                                                PulseKnob knob, double lo, double hi,
                                                int samples = 31, double tol = 1e-10,
                                                double slack = 0.01);

/// Instantaneous eigenvalues of build_full(params with Δ = ratio·Ω, Ω) along a
/// grid of Δ/Ω values, continued by maximal eigenvector overlap.
struct Eigenspectrum {
  std::vector<double> ratios;
  /// energies[k][c]: curve c at grid point k.
  std::vector<std::array<double, 16>> energies;
  /// Computational-basis flat index that curve c tends to at the largest |Δ/Ω|.
  std::array<int, 16> labels{};
  /// Grid points where the overlap assignment was ambiguous (best overlap
  /// below 0.5 for some curve).
  std::vector<int> ambiguous_points;
};

Eigenspectrum eigenspectrum(const SystemParams& params, double omega,
                            const std::vector<double>& delta_over_omega);

/// Populations of |g,100⟩ and |g,001⟩ during a pulse, starting from
/// α|g,100⟩ + β|g,001⟩.
struct InterferenceTrace {
  std::vector<double> times;
  std::vector<double> pop_100;
  std::vector<double> pop_001;
};

InterferenceTrace interference_trace(const SystemParams& params, const PulseProfile& pulse,
                                     Complex alpha, Complex beta, int samples = 2001,
                                     double tol = 1e-10);

/// Gap between the two instantaneous eigenstates continuously connected to
/// |g,100⟩ and |g,001⟩, evaluated at Rabi frequency `omega`.
double interference_gap(const SystemParams& params, double omega, double delta);

/// Oscillation period of pop_100 around the pulse peak: least-squares fit of a
/// quadratic trend plus a sinusoid over [−window, window], scanning the
/// frequency. Returns nullopt if no period between window/8·samples and
/// window fits better than the scan edges.
std::optional<double> measured_period_near_peak(const InterferenceTrace& trace, double window);

}  // namespace medgate
