#include <doctest.h>

#include <random>

#include "medgate/core.hpp"
#include "oracles.hpp"

using namespace medgate;

TEST_CASE("flat index round trip covers all 16 states") {
  for (int i = 0; i < 16; ++i) CHECK(BasisIndex::from_flat(i).flat() == i);
  const BasisIndex b{1, 0, 1, 1};
  CHECK(b.flat() == 11);
  CHECK(BasisIndex::from_flat(11) == b);
  CHECK_THROWS_AS(BasisIndex::from_flat(16), std::invalid_argument);
  CHECK_THROWS_AS(BasisIndex::from_flat(-1), std::invalid_argument);
}

TEST_CASE("pauli embeddings") {
  const Site sites[] = {Site::Q, Site::C, Site::Qp};
  const Axis axes[] = {Axis::x, Axis::y, Axis::z};

  SUBCASE("sigma_z on the control gives -1 for spin down") {
    Vec16 psi = Vec16::Zero();
    psi(BasisIndex{0, 0, 0, 0}.flat()) = 1.0;
    CHECK((pauli_on(Site::C, Axis::z) * psi + psi).norm() == doctest::Approx(0.0));
  }
  SUBCASE("Hermitian, involutive, and matching explicit tensor products") {
    const char names[] = {'x', 'y', 'z'};
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 3; ++a) {
        const Op16 p = pauli_on(sites[s], axes[a]);
        CHECK(hermiticity_defect(p) < 1e-15);
        CHECK((p * p - Op16::Identity()).cwiseAbs().maxCoeff() < 1e-15);
        const oracle::Mat one = oracle::id2();
        const oracle::Mat sigma = oracle::pauli(names[a]);
        const oracle::Mat ref = s == 0   ? oracle::kron4(one, sigma, one, one)
                                : s == 1 ? oracle::kron4(one, one, sigma, one)
                                         : oracle::kron4(one, one, one, sigma);
        CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-15);
      }
    }
  }
  SUBCASE("distinct sites commute") {
    for (int s1 = 0; s1 < 3; ++s1)
      for (int s2 = 0; s2 < 3; ++s2) {
        if (s1 == s2) continue;
        for (Axis a1 : axes)
          for (Axis a2 : axes) {
            const Op16 x = pauli_on(sites[s1], a1), y = pauli_on(sites[s2], a2);
            CHECK((x * y - y * x).cwiseAbs().maxCoeff() < 1e-15);
          }
      }
  }
  SUBCASE("same-site algebra: xy = iz") {
    for (Site s : sites) {
      const Op16 lhs = pauli_on(s, Axis::x) * pauli_on(s, Axis::y);
      CHECK((lhs - kI * pauli_on(s, Axis::z)).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("orbital operators") {
  const Op16 lower = orbital_lowering();
  CHECK((lower.adjoint() * lower - orbital_projector(Orbital::e)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((orbital_flip() - lower - lower.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((orbital_projector(Orbital::g) + orbital_projector(Orbital::e) - Op16::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("partial trace") {
  std::mt19937_64 rng(7);

  SUBCASE("product state factorizes") {
    const Eigen::MatrixXcd a = oracle::random_density(2, rng);
    const Eigen::MatrixXcd b = oracle::random_density(8, rng);
    const Eigen::MatrixXcd rho = Eigen::kroneckerProduct(a, b).eval();
    const Eigen::MatrixXcd reduced = partial_trace(rho, {Subsystem::orbital});
    CHECK((reduced - a).cwiseAbs().maxCoeff() < 1e-14);
    const std::array<int, 2> dims{2, 8};
    const std::array<int, 1> keep_b{1};
    CHECK((partial_trace(rho, dims, keep_b) - b).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("Bell state reduces to I/2") {
    Eigen::Vector4cd bell(1, 0, 0, 1);
    bell /= std::sqrt(2.0);
    const Eigen::MatrixXcd rho = bell * bell.adjoint();
    const std::array<int, 2> dims{2, 2};
    const std::array<int, 1> keep{0};
    const Eigen::MatrixXcd reduced = partial_trace(rho, dims, keep);
    CHECK((reduced - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("trace preserving, Hermitian, PSD and linear on random states") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXcd r1 = oracle::random_density(16, rng);
      const Eigen::MatrixXcd r2 = oracle::random_density(16, rng);
      for (auto keep : {std::initializer_list<Subsystem>{Subsystem::Q, Subsystem::Qp},
                        std::initializer_list<Subsystem>{Subsystem::C},
                        std::initializer_list<Subsystem>{Subsystem::orbital, Subsystem::C}}) {
        const Eigen::MatrixXcd p1 = partial_trace(r1, keep);
        CHECK(std::abs(p1.trace() - 1.0) < 1e-12);
        CHECK(hermiticity_defect(p1) < 1e-14);
        CHECK(min_eigenvalue(p1) > -1e-12);
        const Eigen::MatrixXcd mix = partial_trace(0.3 * r1 + 0.7 * r2, keep);
        CHECK((mix - 0.3 * p1 - 0.7 * partial_trace(r2, keep)).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
  }
  SUBCASE("keep everything is the identity map, keep nothing gives the trace") {
    const Eigen::MatrixXcd rho = oracle::random_density(16, rng);
    const Eigen::MatrixXcd all = partial_trace(
        rho, {Subsystem::orbital, Subsystem::Q, Subsystem::C, Subsystem::Qp});
    CHECK((all - rho).cwiseAbs().maxCoeff() < 1e-15);
    const std::array<int, 4> dims{2, 2, 2, 2};
    const Eigen::MatrixXcd none = partial_trace(rho, dims, std::span<const int>{});
    CHECK(std::abs(none(0, 0) - 1.0) < 1e-12);
  }
  SUBCASE("invalid labels are rejected") {
    const Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(16, 16) / 16.0;
    const std::array<int, 4> dims{2, 2, 2, 2};
    const std::array<int, 1> bad{4};
    const std::array<int, 2> twice{1, 1};
    CHECK_THROWS_AS(partial_trace(rho, dims, bad), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, dims, twice), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {Subsystem::Q, Subsystem::Q}), std::invalid_argument);
    const std::array<int, 2> wrong_dims{2, 2};
    const std::array<int, 1> keep{0};
    CHECK_THROWS_AS(partial_trace(rho, wrong_dims, keep), std::invalid_argument);
  }
}

TEST_CASE("purity") {
  Vec16 psi = Vec16::Zero();
  psi(3) = std::sqrt(0.5);
  psi(12) = kI * std::sqrt(0.5);
  CHECK(purity(psi * psi.adjoint()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(purity(Op16::Identity() / 16.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  Op16 mixed = Op16::Zero();
  mixed(0, 0) = 0.5;
  mixed(9, 9) = 0.5;
  CHECK(purity(mixed) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("Haar product sampling") {
  Rng rng(20240611);
  constexpr int kDraws = 100000;
  double mean_z = 0.0, mean_z2 = 0.0, max_norm_err = 0.0;
  for (int k = 0; k < kDraws; ++k) {
    const QubitPair pair = haar_product_pair(rng);
    max_norm_err = std::max({max_norm_err, std::abs(pair.first.norm() - 1.0),
                             std::abs(pair.second.norm() - 1.0)});
    const double z = std::norm(pair.first(1)) - std::norm(pair.first(0));
    mean_z += z / kDraws;
    mean_z2 += z * z / kDraws;
  }
  CHECK(max_norm_err < 1e-12);
  CHECK(std::abs(mean_z) < 0.01);
  CHECK(std::abs(mean_z2 - 1.0 / 3.0) < 0.01);

  SUBCASE("seeded draws are reproducible") {
    Rng a(5), b(5);
    for (int k = 0; k < 10; ++k) {
      const QubitPair x = haar_product_pair(a), y = haar_product_pair(b);
      CHECK((x.first - y.first).norm() == 0.0);
      CHECK((x.second - y.second).norm() == 0.0);
    }
  }
}

TEST_CASE("reduced parameters") {
  const SystemParams p = SystemParams::from_reduced(0.1, 1.2, 1.0, 0.5);
  CHECK(p.e_q == doctest::Approx(0.11));
  CHECK(p.e_qp == doctest::Approx(0.11));
  CHECK(p.ratio() == doctest::Approx(1.2));
  CHECK(p.j1_reduced() == doctest::Approx(1.0));
  CHECK(p.j2_reduced() == doctest::Approx(0.5));
  SystemParams zero = p;
  zero.e_c = 0.0;
  CHECK_THROWS_AS((void)zero.ratio(), std::invalid_argument);
  CHECK_THROWS_AS((void)zero.j1_reduced(), std::invalid_argument);
}

TEST_CASE("helpers") {
  CHECK(wrap_angle(3 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(0.5) == doctest::Approx(0.5));
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) == mix_seed(1, 0));

  Rng rng(3);
  const Eigen::MatrixXcd u = oracle::random_unitary(16, rng);
  const Eigen::MatrixXcd h = 0.5 * (u + u.adjoint());
  const Op16 expected = oracle::expm(h, 0.7);
  CHECK((expm_hermitian<16>(Op16(h), 0.7) - expected).cwiseAbs().maxCoeff() < 1e-12);
}
