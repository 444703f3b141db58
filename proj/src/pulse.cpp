#include "medgate/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace medgate {

PulseProfile PulseProfile::gaussian(double omega0, double tau, double delta,
                                    double half_width_in_tau) {
  if (tau <= 0.0) throw std::invalid_argument("gaussian pulse needs tau > 0");
  if (half_width_in_tau <= 0.0) throw std::invalid_argument("window half-width must be positive");
  PulseProfile p;
  p.shape = PulseShape::gaussian;
  p.omega0 = omega0;
  p.tau = tau;
  p.delta = delta;
  p.t_start = -half_width_in_tau * tau;
  p.t_end = half_width_in_tau * tau;
  return p;
}

PulseProfile PulseProfile::rectangular(double omega0, double duration, double delta) {
  if (duration < 0.0) throw std::invalid_argument("pulse duration must be non-negative");
  PulseProfile p;
  p.shape = PulseShape::rectangular;
  p.omega0 = omega0;
  p.delta = delta;
  p.t_start = 0.0;
  p.t_end = duration;
  return p;
}

double PulseProfile::rabi(double t) const {
  if (t < t_start || t > t_end) return 0.0;
  if (shape == PulseShape::rectangular) return omega0;
  const double x = t / tau;
  return omega0 * std::exp(-x * x);
}

double PulseProfile::rabi_rate(double t) const {
  if (shape == PulseShape::rectangular || t < t_start || t > t_end) return 0.0;
  const double x = t / tau;
  return -2.0 * x / tau * omega0 * std::exp(-x * x);
}

}  // namespace medgate
