#include "medgate/hamiltonian.hpp"

#include <bit>

#include <cmath>

namespace medgate {

namespace {

// Exchange operator σ^a·σ^C − α σz^a σz^C on the 16-dim space.
Op16 exchange(Site site, double alpha) {
  return pauli_on(site, Axis::x) * pauli_on(Site::C, Axis::x) +
         pauli_on(site, Axis::y) * pauli_on(Site::C, Axis::y) +
         (1.0 - alpha) * pauli_on(site, Axis::z) * pauli_on(Site::C, Axis::z);
}

Op16 zeeman(const SystemParams& p) {
  return p.e_q * pauli_on(Site::Q, Axis::z) + p.e_c * pauli_on(Site::C, Axis::z) +
         p.e_qp * pauli_on(Site::Qp, Axis::z);
}

}  // namespace

Op16 build_static(const SystemParams& p) {
  const Op16 excited = orbital_projector(Orbital::e);
  const Op16 coupling = p.j1 * exchange(Site::Q, p.alpha) + p.j2 * exchange(Site::Qp, p.alpha) +
                        p.delta * Op16::Identity();
  // Exchange acts only inside |e⟩⟨e|; the projector commutes with spin operators.
  return zeeman(p) + excited * coupling;
}

Op16 drive_operator() { return 0.5 * orbital_flip(); }

Op16 build_full(const SystemParams& params, double omega) {
  return build_static(params) + omega * drive_operator();
}

Op8 build_excited(const SystemParams& params) {
  SystemParams p = params;
  p.delta = 0.0;
  return build_static(p).bottomRightCorner<8, 8>();
}

Op8 total_spin_z() {
  Op16 sz = pauli_on(Site::Q, Axis::z) + pauli_on(Site::C, Axis::z) + pauli_on(Site::Qp, Axis::z);
  return sz.topLeftCorner<8, 8>();
}

Op8 SubspaceBlocks::assemble() const {
  Op8 out = Op8::Zero();
  out(kBasis0[0], kBasis0[0]) = h0;
  out(kBasis3[0], kBasis3[0]) = h3;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out(kBasis1[r], kBasis1[c]) = h1(r, c);
      out(kBasis2[r], kBasis2[c]) = h2(r, c);
    }
  }
  return out;
}

SubspaceBlocks subspace_blocks(const SystemParams& params) {
  if (params.e_q != params.e_qp)
    throw std::invalid_argument("analytic subspace blocks require E_Q = E_Q'");
  const double ec = params.e_c;
  const double r = params.ratio();
  const double j1 = params.j1_reduced();
  const double j2 = params.j2_reduced();

  SubspaceBlocks b;
  b.h0 = -ec * (r + 2.0);
  b.h3 = ec * (r + 2.0);
  b.h1 << -r, j1, j2,
           j1, -1.0, 0.0,
           j2, 0.0, -1.0;
  b.h1 *= ec;
  b.h2 << r, j1, j2,
          j1, 1.0, 0.0,
          j2, 0.0, 1.0;
  b.h2 *= ec;

  // Residual Ising part (1 − α)(J1 sQ sC + J2 sQ' sC), diagonal in every block.
  const double ising = 1.0 - params.alpha;
  if (ising != 0.0) {
    const double sum = ising * (params.j1 + params.j2);
    const double diff = ising * (params.j1 - params.j2);
    b.h0 += sum;
    b.h3 += sum;
    b.h1.diagonal() += Vec3(-sum, -diff, diff);
    b.h2.diagonal() += Vec3(-sum, -diff, diff);
  }
  return b;
}

AteFrame rotate_h1_to_ate(const SystemParams& params) {
  const double j1 = params.j1_reduced();
  const double j2 = params.j2_reduced();
  const double norm = std::hypot(j1, j2);
  if (norm == 0.0) throw std::invalid_argument("A/T/E rotation undefined for J1 = J2 = 0");

  AteFrame frame;
  frame.basis << 1.0, 0.0, 0.0,
                 0.0, j1 / norm, j2 / norm,
                 0.0, j2 / norm, -j1 / norm;
  const SubspaceBlocks blocks = subspace_blocks(params);
  frame.hamiltonian = frame.basis.adjoint() * blocks.h1 * frame.basis;
  return frame;
}

std::vector<int> sector_indices(int ups) {
  if (ups < 0 || ups > 3) throw std::invalid_argument("sector index must be 0..3");
  std::vector<int> out;
  for (int orbital = 0; orbital < 2; ++orbital)
    for (int spin = 0; spin < 8; ++spin)
      if (std::popcount(static_cast<unsigned>(spin)) == ups) out.push_back(8 * orbital + spin);
  return out;
}

}  // namespace medgate
