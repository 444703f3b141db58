#pragma once

// Pulsed ("dynamic") gate: a resonant π pulse moves the control to |e⟩, the
// spins evolve under the excited-state XY Hamiltonian for one revival time,
// and a second π pulse returns the control to |g⟩.
//
// Phase convention: U(t) = exp(−iHt) with |0⟩ = spin down. In this convention
// every phase below is the negative of the commonly quoted mirrored-basis
// form, so dynamic_unitary is the complex conjugate of that gate. Entangling
// power and revival times do not depend on the choice.

#include "medgate/core.hpp"
#include "medgate/pulse.hpp"

namespace medgate {

struct DynamicPhases {
  double theta_t = 0.0;
  double theta_e = 0.0;
  double theta_a_prime = 0.0;
  double theta_z = 0.0;
  int n = 1;
};

/// t_rev = 2nπ / (|E_C|·√((R−1)² + 4J1'² + 4J2'²)).
/// Requires α = 1, E_Q = E_Q', n ≥ 1 and a nonzero oscillation frequency.
double revival_time(const SystemParams& params, int n);

/// Phases acquired at t_rev by |T⟩, |E⟩ (Σz = −1), |101⟩ and |000⟩:
///   θ_T  = E_C(1+R)t_rev/2 − πn      θ_E = E_C t_rev
///   θ_A' = −E_C(1+R)t_rev/2 − πn     θ_Z = E_C(R+2) t_rev
DynamicPhases dynamic_phases(const SystemParams& params, int n);

/// Analytic logical gate
///   [[e^{iθ_Z}, 0, 0, 0], [0, Δ1, Δ2, 0], [0, Δ2, Δ3, 0], [0, 0, 0, e^{iθ_A'}]]
/// with Δ1 = (e^{iθ_E}J1'² + e^{iθ_T}J2'²)/N², Δ2 = J1'J2'(e^{iθ_T} − e^{iθ_E})/N²,
/// Δ3 = (e^{iθ_T}J1'² + e^{iθ_E}J2'²)/N². Leakage is zero.
LogicalGate dynamic_unitary(const SystemParams& params, int n);

/// exp(−i·H_e·t) on the 8-dimensional spin space (dense eigendecomposition).
Op8 propagate_excited(const SystemParams& params, double t);

/// Logical block (C = |0⟩ rows and columns) of an 8×8 spin propagator.
LogicalGate logical_block_of_spin_propagator(const Op8& u);

/// Three rectangular segments: π pulse, free wait of t_rev, π pulse (Δ = 0).
PulseSchedule dynamic_schedule(const SystemParams& params, double omega0, int n);

/// Full 16-dimensional propagator of dynamic_schedule.
Op16 pulsed_gate_propagator(const SystemParams& params, double omega0, int n);

/// Logical gate of the full pulsed sequence. The block is taken from the
/// |g⟩, C = |0⟩ sector and divided by (−i)², the phase of two ideal π pulses,
/// so that it converges to dynamic_unitary as omega0 → ∞. Leakage is
/// 1 − (1/4)Σ|U_ij|² over the extracted block.
LogicalGate simulate_pulsed_gate(const SystemParams& params, double omega0, int n);

}  // namespace medgate
