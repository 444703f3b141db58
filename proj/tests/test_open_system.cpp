#include <doctest.h>

#include <random>

#include "medgate/adiabatic_gate.hpp"
#include "medgate/dynamic_gate.hpp"
#include "medgate/hamiltonian.hpp"
#include "medgate/open_system.hpp"
#include "oracles.hpp"

using namespace medgate;

namespace {

oracle::Params to_oracle(const SystemParams& p) {
  return {p.e_q, p.e_c, p.e_qp, p.j1, p.j2, p.alpha, p.delta};
}

oracle::Mat lowering() {
  oracle::Mat s = oracle::Mat::Zero(2, 2);
  s(0, 1) = 1.0;
  return Eigen::kroneckerProduct(s, oracle::Mat::Identity(8, 8)).eval();
}

// Fixed-step RK4 on the Lindblad equation with a constant Hamiltonian.
oracle::Mat lindblad_rk4(const oracle::Mat& rho0, const oracle::Mat& h, double gamma, double t,
                         int steps) {
  const oracle::Mat l = lowering();
  const oracle::Mat ll = l.adjoint() * l;
  auto f = [&](const oracle::Mat& r) -> oracle::Mat {
    return -oracle::I * (h * r - r * h) + gamma * (l * r * l.adjoint() - 0.5 * (ll * r + r * ll));
  };
  oracle::Mat rho = rho0;
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    const oracle::Mat k1 = f(rho);
    const oracle::Mat k2 = f(rho + dt / 2 * k1);
    const oracle::Mat k3 = f(rho + dt / 2 * k2);
    const oracle::Mat k4 = f(rho + dt * k3);
    rho += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return rho;
}

DensityMatrix pure(const Vec16& psi) { return psi * psi.adjoint(); }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

SystemParams test_params() {
  SystemParams p = SystemParams::from_reduced(0.1, 1.2, 1.0, 0.6);
  p.delta = 0.05;
  return p;
}

}  // namespace

TEST_CASE("decay model units") {
  CHECK(DecayModel(1.0).rate() == doctest::Approx(1e-3));
  CHECK(DecayModel(250.0).rate() == doctest::Approx(0.25));
  CHECK_THROWS_AS(DecayModel(-1.0), std::invalid_argument);
}

TEST_CASE("Lindblad generator") {
  std::mt19937_64 rng(41);
  const DecayModel decay(300.0);

  SUBCASE("pure decay of the excited population") {
    Vec16 psi = Vec16::Zero();
    psi(BasisIndex{1, 1, 0, 1}.flat()) = 1.0;
    const DensityMatrix d = lindblad_rhs(pure(psi), Op16::Zero(), decay);
    double excited_rate = 0.0;
    for (int i = 8; i < 16; ++i) excited_rate += d(i, i).real();
    CHECK(excited_rate == doctest::Approx(-decay.rate()));
    CHECK(d(BasisIndex{0, 1, 0, 1}.flat(), BasisIndex{0, 1, 0, 1}.flat()).real() ==
          doctest::Approx(decay.rate()));
  }
  SUBCASE("trace-free, Hermitian, and equal to the tensor-product oracle") {
    const SystemParams p = test_params();
    const Op16 h = build_full(p, 0.4);
    const oracle::Mat l = lowering();
    const oracle::Mat ll = l.adjoint() * l;
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho = oracle::random_density(16, rng);
      const DensityMatrix d = lindblad_rhs(rho, h, decay);
      CHECK(std::abs(d.trace()) < 1e-12);
      CHECK(hermiticity_defect(d) < 1e-14);
      const oracle::Mat ho = oracle::hamiltonian(to_oracle(p), 0.4);
      const oracle::Mat ref = -oracle::I * (ho * rho - rho * ho) +
                              decay.rate() * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
      CHECK(max_abs(d - ref) < 1e-14);
    }
  }
}

TEST_CASE("master equation evolution") {
  const SystemParams p = test_params();
  std::mt19937_64 rng(42);

  SUBCASE("no decay reproduces unitary evolution") {
    const PulseSchedule schedule = {PulseProfile::rectangular(0.4, 30.0, 0.05),
                                    PulseProfile::gaussian(0.3, 8.0, 0.2)};
    const Op16 u = propagate_schedule(p, schedule, 1e-12);
    for (int trial = 0; trial < 3; ++trial) {
      const DensityMatrix rho0 = oracle::random_density(16, rng);
      const DensityMatrix rho = evolve_master(rho0, p, schedule, DecayModel(0.0), 1e-11);
      CHECK(max_abs(rho - u * rho0 * u.adjoint()) < 1e-8);
    }
  }
  SUBCASE("resonant two-level decay matches the Torrey solution") {
    SystemParams q = p;
    q.delta = 0.0;
    const double omega = 0.3;
    const DecayModel decay(100.0);
    DensityMatrix rho0 = DensityMatrix::Zero();
    rho0(0, 0) = 1.0;
    for (double t : {5.0, 17.0, 40.0, 90.0}) {
      const DensityMatrix rho =
          evolve_master(rho0, q, {PulseProfile::rectangular(omega, t, 0.0)}, decay, 1e-10);
      CHECK(std::abs(rho(8, 8).real() - oracle::torrey_excited_population(omega, decay.rate(), t)) <
            1e-6);
    }
  }
  SUBCASE("sector evolution agrees with the full-space oracle") {
    const DecayModel decay(500.0);
    const double omega = 0.35, t = 40.0;
    SystemParams q = p;
    q.delta = 0.1;
    const oracle::Mat h = oracle::hamiltonian(to_oracle(q), omega);
    const PulseSchedule schedule = {PulseProfile::rectangular(omega, t, 0.1)};

    Vec16 psi = Vec16::Zero();
    psi(BasisIndex{0, 1, 0, 0}.flat()) = 0.6;
    psi(BasisIndex{0, 0, 0, 1}.flat()) = 0.8 * kI;
    const DensityMatrix in_sector = pure(psi);
    CHECK(max_abs(evolve_master(in_sector, p, schedule, decay, 1e-11) -
                  lindblad_rk4(in_sector, h, decay.rate(), t, 8000)) < 1e-8);

    const DensityMatrix spread = oracle::random_density(16, rng);
    CHECK(max_abs(evolve_master(spread, p, schedule, decay, 1e-11) -
                  lindblad_rk4(spread, h, decay.rate(), t, 8000)) < 1e-8);
  }
  SUBCASE("density-matrix invariants under drive and decay") {
    const PulseSchedule schedule = {PulseProfile::gaussian(0.3, 10.0, 0.1)};
    for (int trial = 0; trial < 3; ++trial) {
      const DensityMatrix rho =
          evolve_master(oracle::random_density(16, rng), p, schedule, DecayModel(800.0), 1e-10);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
      CHECK(hermiticity_defect(rho) < 1e-12);
      CHECK(min_eigenvalue(rho) > -1e-10);
    }
  }
  SUBCASE("pure decay lowers purity monotonically") {
    Vec16 psi = Vec16::Zero();
    psi(BasisIndex{1, 0, 1, 0}.flat()) = 1.0;
    double previous = 1.0;
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      SystemParams q = p;
      q.j1 = q.j2 = 0.0;
      const DensityMatrix rho =
          evolve_master(pure(psi), q, {PulseProfile::rectangular(0.0, t, 0.0)}, DecayModel(50.0));
      const double pur = purity(rho);
      CHECK(pur <= previous + 1e-12);
      previous = pur;
    }
    CHECK(previous < 1.0);
  }
  SUBCASE("rejected tolerance") {
    CHECK_THROWS_AS(evolve_master(DensityMatrix::Identity() / 16.0, p, {}, DecayModel(), 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("figures of merit") {
  DensityMatrix rho = DensityMatrix::Zero();
  rho(0, 0) = 0.5;
  rho(BasisIndex{1, 0, 0, 0}.flat(), BasisIndex{1, 0, 0, 0}.flat()) = 0.3;
  rho(BasisIndex{0, 0, 1, 0}.flat(), BasisIndex{0, 0, 1, 0}.flat()) = 0.2;
  const FiguresOfMerit f = figures_of_merit(rho);
  CHECK(f.population_computational == doctest::Approx(0.5));
  CHECK(f.purity == doctest::Approx(0.25 + 0.09 + 0.04));
}

TEST_CASE("decoherence study") {
  const SystemParams p = SystemParams::from_reduced(0.1, 1.2, 0.5, 0.5);
  const DynamicGateSpec dyn{p, 5.0, 1};

  SUBCASE("closed-system limit matches the pulsed gate") {
    const std::vector<double> gammas{0.0};
    const auto rows = decoherence_study(dyn, gammas, 1e-10);
    const LogicalGate gate = simulate_pulsed_gate(p, 5.0, 1);
    for (int input = 0; input < 4; ++input) {
      CHECK(rows[0].per_input[input].purity == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(rows[0].per_input[input].population_computational ==
            doctest::Approx(gate.matrix.col(input).squaredNorm()).epsilon(1e-8));
    }
    CHECK(rows[0].mean.population_computational ==
          doctest::Approx(1.0 - gate.leakage).epsilon(1e-8));
  }
  SUBCASE("purity and population fall with the decay rate") {
    const std::vector<double> gammas{0.0, 0.5, 1.0, 2.0};
    const auto rows = decoherence_study(dyn, gammas, 1e-9, 2);
    for (std::size_t g = 1; g < rows.size(); ++g) {
      CHECK(rows[g].gamma0_per_ns == gammas[g]);
      CHECK(rows[g].mean.purity <= rows[g - 1].mean.purity);
      CHECK(rows[g].mean.population_computational <= rows[g - 1].mean.population_computational);
    }
    const auto serial = decoherence_study(dyn, gammas, 1e-9, 1);
    for (std::size_t g = 0; g < rows.size(); ++g) CHECK(serial[g].mean.purity == rows[g].mean.purity);
  }
  SUBCASE("gate specs expose their schedules") {
    CHECK(schedule_of(dyn).size() == 3);
    const AdiabaticGateSpec ad{p, PulseProfile::gaussian(0.1, 50.0, 0.3)};
    CHECK(schedule_of(ad).size() == 1);
    CHECK(&params_of(ad) != nullptr);
  }
}
