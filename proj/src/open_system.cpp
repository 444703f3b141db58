#include "medgate/open_system.hpp"

#include "medgate/dynamic_gate.hpp"
#include "medgate/hamiltonian.hpp"
#include "medgate/parallel.hpp"

namespace medgate {

namespace {

// Decay part of the generator, written blockwise: orbital |g⟩ occupies the
// first half of the rows and |e⟩ the second half, in matching spin order.
template <int N>
void add_decay(Eigen::Matrix<Complex, N, N>& drho, const Eigen::Matrix<Complex, N, N>& rho,
               double gamma) {
  constexpr int H = N / 2;
  if (gamma == 0.0) return;
  drho.template topLeftCorner<H, H>() += gamma * rho.template bottomRightCorner<H, H>();
  drho.template bottomRightCorner<H, H>() -= gamma * rho.template bottomRightCorner<H, H>();
  drho.template topRightCorner<H, H>() -= 0.5 * gamma * rho.template topRightCorner<H, H>();
  drho.template bottomLeftCorner<H, H>() -= 0.5 * gamma * rho.template bottomLeftCorner<H, H>();
}

// Fast generator for Hermitian ρ and H: ρH = (Hρ)†.
template <int N>
Eigen::Matrix<Complex, N, N> hermitian_rhs(const Eigen::Matrix<Complex, N, N>& rho,
                                           const Eigen::Matrix<Complex, N, N>& h, double gamma) {
  const Eigen::Matrix<Complex, N, N> h_rho = h * rho;
  Eigen::Matrix<Complex, N, N> drho = -kI * (h_rho - h_rho.adjoint());
  add_decay<N>(drho, rho, gamma);
  return drho;
}

template <int N>
Eigen::Matrix<Complex, N, N> evolve_block(Eigen::Matrix<Complex, N, N> rho, const SystemParams& params,
                                          const PulseSchedule& schedule, double gamma, double tol,
                                          const std::vector<int>& idx, IntegrationStats* stats) {
  using Mat = Eigen::Matrix<Complex, N, N>;
  for (const PulseProfile& segment : schedule) {
    SystemParams p = params;
    p.delta = segment.delta;
    const Mat h_static = restrict_to<N>(build_static(p), idx);
    const Mat drive = restrict_to<N>(drive_operator(), idx);

    IntegrationOptions opts;
    opts.rtol = tol;
    opts.atol = tol;
    if (segment.shape == PulseShape::gaussian) opts.max_step = 0.25 * segment.tau;

    if (segment.shape == PulseShape::rectangular) {
      const Mat h = h_static + segment.omega0 * drive;
      rho = integrate_dopri5([&](double, const Mat& r) { return hermitian_rhs<N>(r, h, gamma); },
                             rho, segment.t_start, segment.t_end, opts, stats);
    } else {
      rho = integrate_dopri5(
          [&](double t, const Mat& r) {
            return hermitian_rhs<N>(r, h_static + segment.rabi(t) * drive, gamma);
          },
          rho, segment.t_start, segment.t_end, opts, stats);
    }
  }
  return rho;
}

// Sector holding all of ρ's weight, or −1 if ρ spans several sectors.
int support_sector(const DensityMatrix& rho) {
  for (int ups = 0; ups < 4; ++ups) {
    const std::vector<int> idx = sector_indices(ups);
    double inside = 0.0;
    for (int r : idx)
      for (int c : idx) inside += std::norm(rho(r, c));
    if (std::abs(inside - rho.squaredNorm()) == 0.0) return ups;
  }
  return -1;
}

template <int N>
DensityMatrix evolve_in_sector(const DensityMatrix& rho0, const SystemParams& params,
                               const PulseSchedule& schedule, double gamma, double tol,
                               const std::vector<int>& idx, IntegrationStats* stats) {
  const Eigen::Matrix<Complex, N, N> block =
      evolve_block<N>(restrict_to<N>(rho0, idx), params, schedule, gamma, tol, idx, stats);
  DensityMatrix rho = DensityMatrix::Zero();
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) rho(idx[r], idx[c]) = block(r, c);
  return rho;
}

}  // namespace

DecayModel::DecayModel(double gamma0_ns) : gamma0_per_ns(gamma0_ns) {
  if (gamma0_ns < 0.0) throw std::invalid_argument("decay rate must be non-negative");
}

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const Op16& h, const DecayModel& decay) {
  DensityMatrix drho = -kI * (h * rho - rho * h);
  add_decay<16>(drho, rho, decay.rate());
  return drho;
}

DensityMatrix evolve_master(const DensityMatrix& rho0, const SystemParams& params,
                            const PulseSchedule& schedule, const DecayModel& decay, double tol,
                            IntegrationStats* stats) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double gamma = decay.rate();
  // The generator preserves the number of up spins, so a state confined to
  // one sector can be evolved there.
  if (const int sector = support_sector(rho0); sector >= 0) {
    const std::vector<int> idx = sector_indices(sector);
    if (idx.size() == 2)
      return evolve_in_sector<2>(rho0, params, schedule, gamma, tol, idx, stats);
    return evolve_in_sector<6>(rho0, params, schedule, gamma, tol, idx, stats);
  }
  static const std::vector<int> all = [] {
    std::vector<int> v(16);
    for (int i = 0; i < 16; ++i) v[i] = i;
    return v;
  }();
  return evolve_block<16>(rho0, params, schedule, gamma, tol, all, stats);
}

FiguresOfMerit figures_of_merit(const DensityMatrix& rho) {
  FiguresOfMerit f;
  f.purity = purity(rho);
  f.population_computational = 0.0;
  for (int i : kLogicalIndices) f.population_computational += rho(i, i).real();
  return f;
}

const SystemParams& params_of(const GateSpec& spec) {
  return std::visit([](const auto& s) -> const SystemParams& { return s.params; }, spec);
}

PulseSchedule schedule_of(const GateSpec& spec) {
  if (const auto* dyn = std::get_if<DynamicGateSpec>(&spec))
    return dynamic_schedule(dyn->params, dyn->omega0, dyn->n);
  return {std::get<AdiabaticGateSpec>(spec).pulse};
}

std::vector<DecoherenceRow> decoherence_study(const GateSpec& gate,
                                              std::span<const double> gamma0_list, double tol,
                                              int threads) {
  const SystemParams& params = params_of(gate);
  const PulseSchedule schedule = schedule_of(gate);
  const std::size_t runs = gamma0_list.size() * 4;

  std::vector<DecoherenceRow> rows(gamma0_list.size());
  parallel_for(runs, threads, [&](std::size_t run) {
    const std::size_t g = run / 4;
    const int input = static_cast<int>(run % 4);
    DensityMatrix rho0 = DensityMatrix::Zero();
    rho0(kLogicalIndices[input], kLogicalIndices[input]) = 1.0;
    const DensityMatrix rho =
        evolve_master(rho0, params, schedule, DecayModel(gamma0_list[g]), tol);
    rows[g].per_input[input] = figures_of_merit(rho);
  });

  for (std::size_t g = 0; g < rows.size(); ++g) {
    rows[g].gamma0_per_ns = gamma0_list[g];
    FiguresOfMerit mean{0.0, 0.0};
    for (const FiguresOfMerit& f : rows[g].per_input) {
      mean.purity += 0.25 * f.purity;
      mean.population_computational += 0.25 * f.population_computational;
    }
    rows[g].mean = mean;
  }
  return rows;
}

}  // namespace medgate
