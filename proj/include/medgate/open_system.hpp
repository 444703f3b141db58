#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "medgate/core.hpp"
#include "medgate/integrator.hpp"
#include "medgate/pulse.hpp"

namespace medgate {

/// Optical decay of the control, L = |g⟩⟨e| ⊗ 1_spin.
struct DecayModel {
  double gamma0_per_ns = 0.0;

  explicit DecayModel(double gamma0_ns = 0.0);
  /// Γ0 in ps⁻¹.
  [[nodiscard]] double rate() const { return 1e-3 * gamma0_per_ns; }
};

/// −i[H, ρ] + Γ0(LρL† − ½{L†L, ρ}).
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const Op16& h, const DecayModel& decay);

/// Integrates the master equation through a pulse schedule with Dormand–Prince
/// (rtol = atol = tol). Throws IntegrationError on failure.
DensityMatrix evolve_master(const DensityMatrix& rho0, const SystemParams& params,
                            const PulseSchedule& schedule, const DecayModel& decay,
                            double tol = 1e-9, IntegrationStats* stats = nullptr);

struct FiguresOfMerit {
  double purity = 1.0;
  /// tr of ρ over the |g⟩, C = |0⟩ logical sector.
  double population_computational = 1.0;
};

FiguresOfMerit figures_of_merit(const DensityMatrix& rho);

struct DynamicGateSpec {
  SystemParams params;
  double omega0 = 5.0;
  int n = 1;
};

struct AdiabaticGateSpec {
  SystemParams params;
  PulseProfile pulse;
};

using GateSpec = std::variant<DynamicGateSpec, AdiabaticGateSpec>;

const SystemParams& params_of(const GateSpec& spec);
PulseSchedule schedule_of(const GateSpec& spec);

struct DecoherenceRow {
  double gamma0_per_ns = 0.0;
  /// Inputs |00⟩, |01⟩, |10⟩, |11⟩ (control |0⟩, orbital |g⟩).
  std::array<FiguresOfMerit, 4> per_input{};
  /// Uniform average over the four inputs.
  FiguresOfMerit mean;
};

/// Runs the full gate sequence on each logical basis input for each Γ0.
/// Independent runs are spread over `threads` workers; output order follows
/// gamma0_list.
std::vector<DecoherenceRow> decoherence_study(const GateSpec& gate,
                                              std::span<const double> gamma0_list,
                                              double tol = 1e-9, int threads = 1);

}  // namespace medgate
