#include "medgate/dynamic_gate.hpp"

#include <cmath>
#include <numbers>

#include "medgate/hamiltonian.hpp"

namespace medgate {

namespace {

// (R−1)² + 4J1'² + 4J2'².
double oscillation_radicand(const SystemParams& p) {
  const double r = p.ratio();
  const double j1 = p.j1_reduced();
  const double j2 = p.j2_reduced();
  return (r - 1.0) * (r - 1.0) + 4.0 * j1 * j1 + 4.0 * j2 * j2;
}

void check_dynamic_preconditions(const SystemParams& p, int n) {
  if (n < 1) throw std::invalid_argument("revival index n must be >= 1");
  if (p.alpha != 1.0) throw std::invalid_argument("dynamic gate requires alpha = 1 (XY coupling)");
  if (p.e_q != p.e_qp) throw std::invalid_argument("dynamic gate analytics require E_Q = E_Q'");
  if (p.e_c == 0.0) throw std::invalid_argument("dynamic gate requires E_C != 0");
  if (!(oscillation_radicand(p) > 0.0))
    throw std::invalid_argument("no revival: R = 1 with J1 = J2 = 0 gives no oscillation");
}

}  // namespace

double revival_time(const SystemParams& params, int n) {
  check_dynamic_preconditions(params, n);
  return 2.0 * n * std::numbers::pi / (std::abs(params.e_c) * std::sqrt(oscillation_radicand(params)));
}

DynamicPhases dynamic_phases(const SystemParams& params, int n) {
  const double t_rev = revival_time(params, n);
  const double ec = params.e_c;
  const double r = params.ratio();
  const double pi_n = std::numbers::pi * n;
  DynamicPhases ph;
  ph.n = n;
  ph.theta_t = 0.5 * ec * (1.0 + r) * t_rev - pi_n;
  ph.theta_e = ec * t_rev;
  ph.theta_a_prime = -0.5 * ec * (1.0 + r) * t_rev - pi_n;
  ph.theta_z = ec * (r + 2.0) * t_rev;
  return ph;
}

LogicalGate dynamic_unitary(const SystemParams& params, int n) {
  const DynamicPhases ph = dynamic_phases(params, n);
  const double j1 = params.j1_reduced();
  const double j2 = params.j2_reduced();
  const double norm2 = j1 * j1 + j2 * j2;
  const Complex phase_t = std::exp(kI * ph.theta_t);
  const Complex phase_e = std::exp(kI * ph.theta_e);

  Complex d1, d2, d3;
  if (norm2 == 0.0) {
    // Uncoupled: |100⟩ and |001⟩ are both eigenstates with eigenvalue −E_C.
    d1 = d3 = phase_e;
    d2 = 0.0;
  } else {
    d1 = (phase_e * (j1 * j1) + phase_t * (j2 * j2)) / norm2;
    d2 = j1 * j2 * (phase_t - phase_e) / norm2;
    d3 = (phase_t * (j1 * j1) + phase_e * (j2 * j2)) / norm2;
  }

  LogicalGate gate;
  gate.matrix = Op4::Zero();
  gate.matrix(0, 0) = std::exp(kI * ph.theta_z);
  gate.matrix(1, 1) = d1;
  gate.matrix(1, 2) = d2;
  gate.matrix(2, 1) = d2;
  gate.matrix(2, 2) = d3;
  gate.matrix(3, 3) = std::exp(kI * ph.theta_a_prime);
  gate.leakage = 0.0;
  return gate;
}

Op8 propagate_excited(const SystemParams& params, double t) {
  return expm_hermitian<8>(build_excited(params), t);
}

LogicalGate logical_block_of_spin_propagator(const Op8& u) {
  LogicalGate gate;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) gate.matrix(r, c) = u(kLogicalIndices[r], kLogicalIndices[c]);
  gate.leakage = std::max(0.0, 1.0 - 0.25 * gate.matrix.squaredNorm());
  return gate;
}

PulseSchedule dynamic_schedule(const SystemParams& params, double omega0, int n) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("pulse Rabi frequency must be positive");
  const double t_pulse = std::numbers::pi / omega0;
  const double t_rev = revival_time(params, n);
  return {PulseProfile::rectangular(omega0, t_pulse, 0.0), PulseProfile::rectangular(0.0, t_rev, 0.0),
          PulseProfile::rectangular(omega0, t_pulse, 0.0)};
}

Op16 pulsed_gate_propagator(const SystemParams& params, double omega0, int n) {
  SystemParams resonant = params;
  resonant.delta = 0.0;
  Op16 u = Op16::Identity();
  for (const PulseProfile& segment : dynamic_schedule(params, omega0, n))
    u = expm_hermitian<16>(build_full(resonant, segment.omega0), segment.duration()) * u;
  return u;
}

LogicalGate simulate_pulsed_gate(const SystemParams& params, double omega0, int n) {
  const Op16 u = pulsed_gate_propagator(params, omega0, n);
  LogicalGate gate;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) gate.matrix(r, c) = -u(kLogicalIndices[r], kLogicalIndices[c]);
  gate.leakage = std::max(0.0, 1.0 - 0.25 * gate.matrix.squaredNorm());
  return gate;
}

}  // namespace medgate
