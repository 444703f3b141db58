#pragma once

#include <vector>

namespace medgate {

enum class PulseShape { rectangular, gaussian };

/// Rabi-frequency profile over a time window, with constant detuning.
///
/// rectangular: Ω(t) = omega0 on [t_start, t_end].
/// gaussian:    Ω(t) = omega0·exp(−(t/tau)²), clamped to 0 outside the window.
struct PulseProfile {
  PulseShape shape = PulseShape::gaussian;
  double omega0 = 0.0;  // ps⁻¹
  double tau = 0.0;     // ps, gaussian width
  double delta = 0.0;   // ps⁻¹
  double t_start = 0.0;
  double t_end = 0.0;

  /// Gaussian pulse centred at 0 with the window ±half_width_in_tau·τ.
  static PulseProfile gaussian(double omega0, double tau, double delta,
                               double half_width_in_tau = 5.0);
  /// Constant Ω for `duration` picoseconds, window [0, duration].
  static PulseProfile rectangular(double omega0, double duration, double delta);

  [[nodiscard]] double rabi(double t) const;
  /// dΩ/dt.
  [[nodiscard]] double rabi_rate(double t) const;
  [[nodiscard]] double duration() const { return t_end - t_start; }
};

/// Sequence of pulses applied back to back (each in its own window).
using PulseSchedule = std::vector<PulseProfile>;

}  // namespace medgate
