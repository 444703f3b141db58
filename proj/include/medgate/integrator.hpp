#pragma once

// Adaptive time integration.
//
// integrate_dopri5: Dormand–Prince 5(4) with FSAL and a standard
//   proportional step controller. Works on any fixed-size Eigen matrix type.
// propagate_magnus: sixth-order Magnus propagator for H(t) = H0 + f(t)·V
//   with step-doubling error control. Every step is an exact exponential of a
//   Hermitian matrix, so the result is unitary to rounding.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "medgate/core.hpp"

namespace medgate {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegrationOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 → pick from the interval length
  double max_step = 0.0;      // 0 → unlimited
  double min_step = 1e-12;
  long max_steps = 50'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
};

template <class State, class Rhs>
State integrate_dopri5(Rhs&& rhs, State y, double t0, double t1, const IntegrationOptions& opts,
                       IntegrationStats* stats = nullptr) {
  // Butcher tableau (Hairer & Wanner).
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span == 0.0) return y;
  if (span < 0.0) throw std::invalid_argument("integrate_dopri5 requires t1 >= t0");

  double h = opts.initial_step > 0.0 ? opts.initial_step : span / 100.0;
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  double t = t0;
  State k1 = rhs(t, y);
  long steps = 0;

  while (t < t1) {
    if (++steps > opts.max_steps) throw IntegrationError("dopri5: step budget exhausted");
    const bool last = t + h >= t1;
    if (last) h = t1 - t;

    const State k2 = rhs(t + c2 * h, State(y + h * (a21 * k1)));
    const State k3 = rhs(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = rhs(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 =
        rhs(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                               a65 * k5)));
    State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(t + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const auto scale =
        (opts.atol + opts.rtol * y.array().abs().max(y_new.array().abs())).eval();
    const double err_norm = (err.array().abs() / scale).maxCoeff();

    if (err_norm <= 1.0) {
      t = last ? t1 : t + h;
      y = std::move(y_new);
      k1 = k7;
      if (stats) ++stats->accepted;
    } else if (stats) {
      ++stats->rejected;
    }

    const double factor =
        err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    h *= err_norm <= 1.0 ? factor : std::min(factor, 1.0);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (h < opts.min_step && t < t1)
      throw IntegrationError("dopri5: step size underflow at t = " + std::to_string(t));
  }
  return y;
}

/// Scalar drive envelope f(t) multiplying the drive operator.
using Envelope = std::function<double(double)>;

namespace detail {

// One sixth-order Magnus step (three-point Gauss–Legendre). With A = −iH
// sampled at the nodes,
//   α1 = h·A2, α2 = (√15h/3)(A3 − A1), α3 = (10h/3)(A3 − 2A2 + A1)
//   C1 = [α1, α2], C2 = −[α1, 2α3 + C1]/60
//   Ω = α1 + α3/12 + [−20α1 − α3 + C1, α2 + C2]/240
template <int N>
Eigen::Matrix<Complex, N, N> magnus_step(const Eigen::Matrix<Complex, N, N>& h0,
                                         const Eigen::Matrix<Complex, N, N>& v, const Envelope& f,
                                         double t, double h) {
  using Mat = Eigen::Matrix<Complex, N, N>;
  static const double offset = std::sqrt(15.0) / 10.0;
  const double f1 = f(t + h * (0.5 - offset));
  const double f2 = f(t + 0.5 * h);
  const double f3 = f(t + h * (0.5 + offset));
  auto comm = [](const Mat& a, const Mat& b) -> Mat { return a * b - b * a; };
  const Mat a2 = -kI * (h0 + f2 * v);
  const Mat alpha1 = h * a2;
  const Mat alpha2 = (-kI * (std::sqrt(15.0) * h / 3.0 * (f3 - f1))) * v;
  const Mat alpha3 = (-kI * (10.0 * h / 3.0 * (f3 - 2.0 * f2 + f1))) * v;
  const Mat c1 = comm(alpha1, alpha2);
  const Mat c2 = (-1.0 / 60.0) * comm(alpha1, 2.0 * alpha3 + c1);
  const Mat omega =
      alpha1 + alpha3 / 12.0 + comm(-20.0 * alpha1 - alpha3 + c1, alpha2 + c2) / 240.0;
  // Ω is anti-Hermitian up to rounding; H_eff = iΩ is symmetrized before the eigensolve.
  const Mat effective = kI * omega;
  const Mat hermitian = 0.5 * (effective + effective.adjoint());
  return expm_hermitian<N>(hermitian, 1.0);
}

}  // namespace detail

/// Time-ordered propagator of H(t) = h0 + f(t)·v from t0 to t1, left-multiplied
/// onto `initial`. The step-doubling error estimate, scaled per unit time, is
/// held below opts.rtol so the accumulated error over [t0, t1] stays near it.
template <int N>
Eigen::Matrix<Complex, N, N> propagate_magnus_n(const Eigen::Matrix<Complex, N, N>& h0,
                                                const Eigen::Matrix<Complex, N, N>& v,
                                                const Envelope& f, double t0, double t1,
                                                const IntegrationOptions& opts,
                                                const Eigen::Matrix<Complex, N, N>& initial,
                                                IntegrationStats* stats = nullptr) {
  using Mat = Eigen::Matrix<Complex, N, N>;
  const double span = t1 - t0;
  if (span < 0.0) throw std::invalid_argument("propagate_magnus requires t1 >= t0");
  if (span == 0.0) return initial;
  if (opts.rtol <= 0.0) throw std::invalid_argument("tolerance must be positive");

  double h = opts.initial_step > 0.0 ? opts.initial_step : span / 100.0;
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  double t = t0;
  Mat u = initial;
  long steps = 0;

  while (t < t1) {
    if (++steps > opts.max_steps) throw IntegrationError("magnus: step budget exhausted");
    const bool last = t + h >= t1;
    if (last) h = t1 - t;

    const Mat full = detail::magnus_step<N>(h0, v, f, t, h);
    const Mat halves = detail::magnus_step<N>(h0, v, f, t + 0.5 * h, 0.5 * h) *
                       detail::magnus_step<N>(h0, v, f, t, 0.5 * h);
    // Richardson: the two-half-step result carries about 1/63 of the
    // difference. Scaling by span/h bounds the accumulated global error.
    // Differences at the rounding level carry no information and are not
    // allowed to force the step down.
    const double diff = (full - halves).cwiseAbs().maxCoeff();
    const double noise = 64.0 * std::numeric_limits<double>::epsilon();
    const double err = diff <= noise ? 0.0 : diff / 63.0 * (span / h);

    if (err <= opts.rtol) {
      u = halves * u;
      t = last ? t1 : t + h;
      if (stats) ++stats->accepted;
    } else if (stats) {
      ++stats->rejected;
    }

    const double factor =
        err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(opts.rtol / err, 1.0 / 6.0), 0.2, 4.0);
    h *= err <= opts.rtol ? factor : std::min(factor, 1.0);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (h < opts.min_step && t < t1)
      throw IntegrationError("magnus: step size underflow at t = " + std::to_string(t));
  }
  return u;
}

/// 16-dimensional propagate_magnus_n.
Op16 propagate_magnus(const Op16& h0, const Op16& v, const Envelope& f, double t0, double t1,
                      const IntegrationOptions& opts, const Op16& initial = Op16::Identity(),
                      IntegrationStats* stats = nullptr);

}  // namespace medgate
