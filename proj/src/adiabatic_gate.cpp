#include "medgate/adiabatic_gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "medgate/entangling_power.hpp"
#include "medgate/hamiltonian.hpp"

namespace medgate {

namespace {

SystemParams with_delta(const SystemParams& params, double delta) {
  SystemParams p = params;
  p.delta = delta;
  return p;
}

PulseProfile with_knob(const PulseProfile& pulse_template, PulseKnob knob, double value) {
  PulseProfile p = pulse_template;
  if (knob == PulseKnob::tau) {
    const double half_width = pulse_template.t_end / pulse_template.tau;
    p = PulseProfile::gaussian(pulse_template.omega0, value, pulse_template.delta, half_width);
  } else {
    p.delta = value;
  }
  return p;
}

IntegrationOptions magnus_options(const PulseProfile& pulse, double tol) {
  IntegrationOptions opts;
  opts.rtol = tol;
  // The window edges carry negligible drive; cap the step so the Gauss points
  // cannot straddle the whole pulse.
  opts.max_step = pulse.shape == PulseShape::gaussian ? 0.25 * pulse.tau : 0.0;
  return opts;
}

// Curves continued across a sequence of Hamiltonians by maximal overlap.
struct Continuation {
  std::vector<std::array<double, 16>> energies;
  std::array<int, 16> labels{};
  std::vector<int> ambiguous_points;
};

Continuation continue_curves(const std::vector<Op16>& hamiltonians) {
  Continuation out;
  if (hamiltonians.empty()) return out;

  Eigen::SelfAdjointEigenSolver<Op16> solver(hamiltonians.front());
  Op16 vectors = solver.eigenvectors();
  std::array<double, 16> energy{};
  for (int c = 0; c < 16; ++c) {
    energy[c] = solver.eigenvalues()(c);
    vectors.col(c).cwiseAbs2().maxCoeff(&out.labels[c]);
  }
  out.energies.push_back(energy);

  for (std::size_t k = 1; k < hamiltonians.size(); ++k) {
    solver.compute(hamiltonians[k]);
    const auto& vals = solver.eigenvalues();
    const Op16& vecs = solver.eigenvectors();

    // Group numerically degenerate eigenvalues into clusters.
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < 16; ++i) {
      const double scale = std::max(1.0, std::abs(vals(i)));
      if (!clusters.empty() && std::abs(vals(i) - vals(clusters.back().back())) < 1e-9 * scale)
        clusters.back().push_back(i);
      else
        clusters.push_back({i});
    }

    // Weight of each previous curve in each cluster.
    const int ncl = static_cast<int>(clusters.size());
    std::vector<std::array<double, 16>> weight(ncl);
    struct Candidate {
      double w;
      int curve;
      int cluster;
    };
    std::vector<Candidate> candidates;
    for (int g = 0; g < ncl; ++g) {
      for (int c = 0; c < 16; ++c) {
        double w = 0.0;
        for (int i : clusters[g]) w += std::norm(vecs.col(i).dot(vectors.col(c)));
        weight[g][c] = w;
        candidates.push_back({w, c, g});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.w > b.w; });

    std::array<int, 16> assigned;
    assigned.fill(-1);
    std::vector<int> capacity(ncl);
    for (int g = 0; g < ncl; ++g) capacity[g] = static_cast<int>(clusters[g].size());
    bool ambiguous = false;
    for (const Candidate& cand : candidates) {
      if (assigned[cand.curve] >= 0 || capacity[cand.cluster] == 0) continue;
      assigned[cand.curve] = cand.cluster;
      --capacity[cand.cluster];
      if (cand.w < 0.5) ambiguous = true;
    }
    if (ambiguous) out.ambiguous_points.push_back(static_cast<int>(k));

    // New vectors: projections of the previous ones onto their cluster,
    // orthonormalized within the cluster.
    Op16 next = Op16::Zero();
    for (int g = 0; g < ncl; ++g) {
      Eigen::Matrix<Complex, 16, Eigen::Dynamic> basis(16, clusters[g].size());
      for (std::size_t j = 0; j < clusters[g].size(); ++j) basis.col(j) = vecs.col(clusters[g][j]);
      std::vector<Vec16> chosen;
      for (int c = 0; c < 16; ++c) {
        if (assigned[c] != g) continue;
        Vec16 v = basis * (basis.adjoint() * vectors.col(c));
        for (const Vec16& u : chosen) v -= u * u.dot(v);
        if (v.norm() < 1e-8) {
          // Fall back to any cluster direction orthogonal to those chosen.
          for (Eigen::Index j = 0; j < basis.cols(); ++j) {
            v = basis.col(j);
            for (const Vec16& u : chosen) v -= u * u.dot(v);
            if (v.norm() > 1e-6) break;
          }
        }
        v.normalize();
        chosen.push_back(v);
        next.col(c) = v;
        double e = 0.0;
        for (int i : clusters[g]) e += vals(i);
        energy[c] = e / static_cast<double>(clusters[g].size());
      }
    }
    vectors = next;
    out.energies.push_back(energy);
  }
  return out;
}

}  // namespace

double adiabaticity_metric(const PulseProfile& pulse, double t) {
  const double omega = pulse.rabi(t);
  const double omega_dot = pulse.rabi_rate(t);
  const double numerator = omega_dot * pulse.delta;  // Δ̇ = 0
  if (numerator == 0.0) return 0.0;
  const double radius2 = pulse.delta * pulse.delta + omega * omega;
  return std::abs(numerator) / (2.0 * std::pow(radius2, 1.5));
}

double max_adiabaticity_metric(const PulseProfile& pulse) {
  constexpr int kSamples = 4001;
  const double a = pulse.t_start;
  const double b = pulse.t_end;
  const double dt = (b - a) / (kSamples - 1);
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i < kSamples; ++i) {
    const double v = adiabaticity_metric(pulse, a + i * dt);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  // Golden-section refinement on the bracketing interval.
  double lo = a + std::max(0, best - 1) * dt;
  double hi = a + std::min(kSamples - 1, best + 1) * dt;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = adiabaticity_metric(pulse, x1);
  double f2 = adiabaticity_metric(pulse, x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = adiabaticity_metric(pulse, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = adiabaticity_metric(pulse, x2);
    }
  }
  return std::max({best_value, f1, f2});
}

Op16 propagate_pulse_interval(const SystemParams& params, const PulseProfile& pulse, double t0,
                              double t1, double tol, const Op16& initial) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const SystemParams p = with_delta(params, pulse.delta);
  if (pulse.shape == PulseShape::rectangular)
    return expm_hermitian<16>(build_full(p, pulse.omega0), t1 - t0) * initial;
  const Envelope envelope = [&pulse](double t) { return pulse.rabi(t); };
  const Op16 h0 = build_static(p);
  const Op16 v = drive_operator();
  const IntegrationOptions opts = magnus_options(pulse, tol);
  // H(t) is block diagonal over the spin sectors; propagate each block.
  Op16 u = Op16::Zero();
  for (int ups = 0; ups < 4; ++ups) {
    const std::vector<int> idx = sector_indices(ups);
    auto scatter = [&](const auto& block) {
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) u(idx[r], idx[c]) = block(r, c);
    };
    if (idx.size() == 2) {
      scatter(propagate_magnus_n<2>(restrict_to<2>(h0, idx), restrict_to<2>(v, idx), envelope, t0,
                                    t1, opts, Op2::Identity()));
    } else {
      scatter(propagate_magnus_n<6>(restrict_to<6>(h0, idx), restrict_to<6>(v, idx), envelope, t0,
                                    t1, opts, Eigen::Matrix<Complex, 6, 6>::Identity()));
    }
  }
  return u * initial;
}

Op16 propagate_pulse(const SystemParams& params, const PulseProfile& pulse, double tol) {
  return propagate_pulse_interval(params, pulse, pulse.t_start, pulse.t_end, tol);
}

Op16 propagate_schedule(const SystemParams& params, const PulseSchedule& schedule, double tol) {
  Op16 u = Op16::Identity();
  for (const PulseProfile& segment : schedule)
    u = propagate_pulse_interval(params, segment, segment.t_start, segment.t_end, tol, u);
  return u;
}

LogicalGate extract_logical_gate(const Op16& u) {
  LogicalGate gate;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) gate.matrix(r, c) = u(kLogicalIndices[r], kLogicalIndices[c]);
  gate.leakage = std::max(0.0, 1.0 - 0.25 * gate.matrix.squaredNorm());
  return gate;
}

AdiabaticGateResult adiabatic_gate(const SystemParams& params, const PulseProfile& pulse,
                                   double tol) {
  AdiabaticGateResult result;
  result.gate = extract_logical_gate(propagate_pulse(params, pulse, tol));
  result.valid = result.gate.leakage <= kLeakageThreshold;
  return result;
}

CphaseReport cphase_report(const LogicalGate& gate) {
  if (gate.leakage > kLeakageThreshold)
    throw std::invalid_argument("CPHASE analysis needs leakage below 1e-3");
  CphaseReport report;
  for (int i = 0; i < 4; ++i) report.phases[i] = std::arg(gate.matrix(i, i));
  report.phi = wrap_angle(report.phases[0] - report.phases[1] - report.phases[2] + report.phases[3]);
  report.offdiag_norm = std::abs(gate.matrix(1, 2)) + std::abs(gate.matrix(2, 1));
  report.diagonal = report.offdiag_norm <= 0.1;
  return report;
}

CphaseSearchResult find_cphase(const SystemParams& params, const PulseProfile& pulse_template,
                               PulseKnob knob, double lo, double hi, int samples, double phi_tol,
                               double tol) {
  if (samples < 2 || !(hi > lo)) throw std::invalid_argument("invalid CPHASE scan range");

  auto make_pulse = [&](double value) { return with_knob(pulse_template, knob, value); };
  struct Point {
    double value;
    double raw_phi;
    double leakage;
    LogicalGate gate;
  };
  auto evaluate = [&](double value) {
    const LogicalGate gate = extract_logical_gate(propagate_pulse(params, make_pulse(value), tol));
    double raw = 0.0;
    if (gate.leakage <= kLeakageThreshold) raw = cphase_report(gate).phi;
    return Point{value, raw, gate.leakage, gate};
  };

  CphaseSearchResult result;
  // φ − π in units of 2π; a crossing is a change of floor().
  auto branch = [](double phi) { return std::floor((phi - std::numbers::pi) / (2.0 * std::numbers::pi)); };

  std::optional<Point> prev;
  double prev_unwrapped = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double value = lo + (hi - lo) * k / (samples - 1);
    Point pt = evaluate(value);
    if (pt.leakage > kLeakageThreshold) {
      result.trace.push_back({value, std::nan(""), pt.leakage});
      prev.reset();
      continue;
    }
    double unwrapped = prev ? prev_unwrapped + wrap_angle(pt.raw_phi - prev->raw_phi) : pt.raw_phi;
    result.trace.push_back({value, unwrapped, pt.leakage});

    if (prev && branch(unwrapped) != branch(prev_unwrapped)) {
      // Target: the odd multiple of π between the two samples.
      const double target =
          std::numbers::pi + 2.0 * std::numbers::pi * std::max(branch(unwrapped), branch(prev_unwrapped));
      Point left = *prev;
      double left_phi = prev_unwrapped;
      Point right = pt;
      double right_phi = unwrapped;
      Point best = std::abs(left_phi - target) < std::abs(right_phi - target) ? left : right;
      double best_err = std::min(std::abs(left_phi - target), std::abs(right_phi - target));
      for (int it = 0; it < 60 && best_err > phi_tol; ++it) {
        // Secant guess, safeguarded towards bisection.
        double frac = (target - left_phi) / (right_phi - left_phi);
        if (!(frac > 0.05 && frac < 0.95)) frac = 0.5;
        const Point mid = evaluate(left.value + frac * (right.value - left.value));
        if (mid.leakage > kLeakageThreshold) break;
        const double mid_phi = left_phi + wrap_angle(mid.raw_phi - left.raw_phi);
        const double err = std::abs(mid_phi - target);
        if (err < best_err) {
          best_err = err;
          best = mid;
        }
        if ((mid_phi - target) * (left_phi - target) > 0.0) {
          left = mid;
          left_phi = mid_phi;
        } else {
          right = mid;
          right_phi = mid_phi;
        }
      }
      result.found = best_err <= phi_tol;
      result.value = best.value;
      result.pulse = make_pulse(best.value);
      result.gate = best.gate;
      result.report = cphase_report(best.gate);
      result.message = result.found ? "converged" : "crossing bracketed but tolerance not reached";
      return result;
    }
    prev = std::move(pt);
    prev_unwrapped = unwrapped;
  }
  result.message = "no crossing of an odd multiple of pi in the scanned range";
  return result;
}

CphaseSearchResult find_cphase_tau(const SystemParams& params, const PulseProfile& pulse_template,
                                   double tau_lo, double tau_hi, int samples, double phi_tol,
                                   double tol) {
  if (pulse_template.shape != PulseShape::gaussian)
    throw std::invalid_argument("tau scan needs a gaussian pulse template");
  return find_cphase(params, pulse_template, PulseKnob::tau, tau_lo, tau_hi, samples, phi_tol, tol);
}

Eigenspectrum eigenspectrum(const SystemParams& params, double omega,
                            const std::vector<double>& delta_over_omega) {
  Eigenspectrum spec;
  spec.ratios = delta_over_omega;
  if (delta_over_omega.empty()) return spec;

  // Continue from the grid end with the largest |Δ/Ω|.
  const bool from_back =
      std::abs(delta_over_omega.back()) >= std::abs(delta_over_omega.front());
  std::vector<Op16> hamiltonians;
  const int n = static_cast<int>(delta_over_omega.size());
  for (int i = 0; i < n; ++i) {
    const double ratio = delta_over_omega[from_back ? n - 1 - i : i];
    hamiltonians.push_back(build_full(with_delta(params, ratio * omega), omega));
  }
  Continuation cont = continue_curves(hamiltonians);
  if (from_back) {
    std::reverse(cont.energies.begin(), cont.energies.end());
    for (int& k : cont.ambiguous_points) k = n - 1 - k;
    std::sort(cont.ambiguous_points.begin(), cont.ambiguous_points.end());
  }
  spec.energies = std::move(cont.energies);
  spec.labels = cont.labels;
  spec.ambiguous_points = std::move(cont.ambiguous_points);
  return spec;
}

InterferenceTrace interference_trace(const SystemParams& params, const PulseProfile& pulse,
                                     Complex alpha, Complex beta, int samples, double tol) {
  if (samples < 2) throw std::invalid_argument("trace needs at least two samples");
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("|alpha|^2 + |beta|^2 must be 1");

  constexpr int kG100 = 4;  // |g⟩|Q=1,C=0,Q'=0⟩
  constexpr int kG001 = 1;
  Vec16 psi0 = Vec16::Zero();
  psi0(kG100) = alpha;
  psi0(kG001) = beta;

  InterferenceTrace trace;
  Op16 u = Op16::Identity();
  double t_prev = pulse.t_start;
  for (int k = 0; k < samples; ++k) {
    const double t = pulse.t_start + (pulse.t_end - pulse.t_start) * k / (samples - 1);
    if (k > 0) u = propagate_pulse_interval(params, pulse, t_prev, t, tol, u);
    const Vec16 psi = u * psi0;
    trace.times.push_back(t);
    trace.pop_100.push_back(std::norm(psi(kG100)));
    trace.pop_001.push_back(std::norm(psi(kG001)));
    t_prev = t;
  }
  return trace;
}

double interference_gap(const SystemParams& params, double omega, double delta) {
  constexpr int kRamp = 400;
  const SystemParams p = with_delta(params, delta);
  std::vector<Op16> hamiltonians;
  for (int k = 0; k <= kRamp; ++k) hamiltonians.push_back(build_full(p, omega * k / kRamp));
  const Continuation cont = continue_curves(hamiltonians);
  int mu = -1, nu = -1;
  for (int c = 0; c < 16; ++c) {
    if (cont.labels[c] == 4) mu = c;
    if (cont.labels[c] == 1) nu = c;
  }
  if (mu < 0 || nu < 0) throw std::runtime_error("could not identify the |g,100> / |g,001> curves");
  return std::abs(cont.energies.back()[nu] - cont.energies.back()[mu]);
}

std::optional<double> measured_period_near_peak(const InterferenceTrace& trace, double window) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (std::abs(trace.times[i]) > window) continue;
    t.push_back(trace.times[i]);
    y.push_back(trace.pop_100[i]);
  }
  if (t.size() < 16) return std::nullopt;
  const auto m = static_cast<Eigen::Index>(t.size());
  const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), m);

  // Residual of a least-squares fit by a quadratic trend plus a sinusoid of
  // angular frequency w; the trend absorbs the slow light-shift envelope.
  auto residual = [&](double w) {
    Eigen::MatrixXd basis(m, 5);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double s = t[i] / window;
      basis.row(i) << 1.0, s, s * s, std::cos(w * t[i]), std::sin(w * t[i]);
    }
    return (basis * basis.colPivHouseholderQr().solve(rhs) - rhs).squaredNorm();
  };

  // At least two periods inside the window, at least eight samples per period.
  const double dt = (t.back() - t.front()) / static_cast<double>(m - 1);
  const double w_lo = 2.0 * std::numbers::pi / window;
  const double w_hi = 2.0 * std::numbers::pi / (8.0 * dt);
  if (!(w_hi > w_lo)) return std::nullopt;
  constexpr int kGrid = 400;
  const double ratio = std::pow(w_hi / w_lo, 1.0 / (kGrid - 1));
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kGrid; ++k) {
    const double r = residual(w_lo * std::pow(ratio, k));
    if (r < best_value) {
      best_value = r;
      best = k;
    }
  }
  if (best == 0 || best == kGrid - 1) return std::nullopt;
  double lo = w_lo * std::pow(ratio, best - 1);
  double hi = w_lo * std::pow(ratio, best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = residual(x1), f2 = residual(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = residual(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = residual(x2);
    }
  }
  return 2.0 * std::numbers::pi / (0.5 * (lo + hi));
}

EntanglerSearchResult maximize_entangling_power(const SystemParams& params,
                                                const PulseProfile& pulse_template,
                                                PulseKnob knob, double lo, double hi,
                                                int samples, double tol, double slack) {
  if (samples < 2 || !(hi > lo)) throw std::invalid_argument("invalid search range");
  auto evaluate = [&](double value) {
    const PulseProfile pulse = with_knob(pulse_template, knob, value);
    const AdiabaticGateResult result = adiabatic_gate(params, pulse, tol);
    double e = -1.0;
    if (result.valid) e = entangling_power_closed(LogicalGate{nearest_unitary(result.gate.matrix), 0.0});
    return std::pair{e, result.gate};
  };

  std::vector<double> grid(samples), values(samples);
  std::vector<LogicalGate> gates(samples);
  double top = -1.0;
  for (int k = 0; k < samples; ++k) {
    grid[k] = lo + (hi - lo) * k / (samples - 1);
    std::tie(values[k], gates[k]) = evaluate(grid[k]);
    top = std::max(top, values[k]);
  }
  EntanglerSearchResult best;
  if (top < 0.0) {
    best.message = "every scanned pulse leaks above threshold";
    return best;
  }
  best.found = true;

  // Among sampled local maxima within `slack` of the best, take the one with
  // the weakest excitation: largest detuning, or shortest pulse.
  const bool prefer_high = knob == PulseKnob::delta;
  int best_index = -1;
  for (int step = 0; step < samples; ++step) {
    const int k = prefer_high ? samples - 1 - step : step;
    const bool left_ok = k == 0 || values[k] >= values[k - 1];
    const bool right_ok = k == samples - 1 || values[k] >= values[k + 1];
    if (values[k] >= top - slack && left_ok && right_ok) {
      best_index = k;
      break;
    }
  }
  best.entangling_power = values[best_index];
  best.value = grid[best_index];
  best.gate = gates[best_index];

  // Golden-section refinement between the neighbours of the best sample.
  double a = grid[std::max(0, best_index - 1)];
  double b = grid[std::min(samples - 1, best_index + 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  auto f1 = evaluate(x1), f2 = evaluate(x2);
  for (int iter = 0; iter < 30 && b - a > 1e-4 * (hi - lo); ++iter) {
    if (f1.first >= f2.first) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = evaluate(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = evaluate(x2);
    }
  }
  for (const auto& [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (f.first > best.entangling_power) {
      best.entangling_power = f.first;
      best.value = x;
      best.gate = f.second;
    }
  }
  best.pulse = with_knob(pulse_template, knob, best.value);
  return best;
}

}  // namespace medgate
