#pragma once

#include <array>
#include <vector>

#include "medgate/core.hpp"

namespace medgate {

/// Rotating-frame Hamiltonian with a constant Rabi frequency `omega`:
///
///   H = Σ_j E_j σz^j + (Ω/2)(|e⟩⟨g| + |g⟩⟨e|)
///       + |e⟩⟨e| ⊗ [J1(σ^Q·σ^C − α σz^Q σz^C) + J2(σ^Q'·σ^C − α σz^Q' σz^C) + Δ]
///
/// There is no exchange in the |g⟩ block.
Op16 build_full(const SystemParams& params, double omega);

/// The Ω-independent part of build_full.
Op16 build_static(const SystemParams& params);

/// ∂H/∂Ω = (|e⟩⟨g| + |g⟩⟨e|)/2.
Op16 drive_operator();

/// Flat indices of the sector with `ups` spins up (0..3). The drive, the
/// exchange and optical decay all preserve this number. Orbital |g⟩ states
/// come first, then the |e⟩ states in the same spin order, so the sector has
/// the same orbital ⊗ spin block layout as the full space.
std::vector<int> sector_indices(int ups);

/// Sub-matrix of `op` on the given flat indices.
template <int N>
Eigen::Matrix<Complex, N, N> restrict_to(const Op16& op, const std::vector<int>& indices) {
  Eigen::Matrix<Complex, N, N> out;
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) out(r, c) = op(indices[r], indices[c]);
  return out;
}

/// Spin Hamiltonian seen while the control is excited: Zeeman plus exchange,
/// without the detuning offset. Acting on |QCQ'⟩ (index 4Q + 2C + Q').
Op8 build_excited(const SystemParams& params);

/// Σz = σz^Q + σz^C + σz^Q' on the 8-dimensional spin space.
Op8 total_spin_z();

/// The excited-state spin Hamiltonian split into its conserved-Σz blocks.
///
/// Block bases (spin-index labels |QCQ'⟩):
///   h0: |000⟩                         (Σz = −3)
///   h1: |010⟩, |100⟩, |001⟩           (Σz = −1)
///   h2: |101⟩, |011⟩, |110⟩           (Σz = +1)
///   h3: |111⟩                         (Σz = +3)
///
/// With |0⟩ = spin down the blocks read
///   h1 = E_C [[−R, J1', J2'], [J1', −1, 0], [J2', 0, −1]]
///   h2 = E_C [[ R, J1', J2'], [J1',  1, 0], [J2', 0,  1]]
/// and h0 = −E_C(R + 2), h3 = +E_C(R + 2).
struct SubspaceBlocks {
  double h0 = 0.0;
  Op3 h1 = Op3::Zero();
  Op3 h2 = Op3::Zero();
  double h3 = 0.0;

  static constexpr std::array<int, 1> kBasis0{spin_index(0, 0, 0)};
  static constexpr std::array<int, 3> kBasis1{spin_index(0, 1, 0), spin_index(1, 0, 0),
                                              spin_index(0, 0, 1)};
  static constexpr std::array<int, 3> kBasis2{spin_index(1, 0, 1), spin_index(0, 1, 1),
                                              spin_index(1, 1, 0)};
  static constexpr std::array<int, 1> kBasis3{spin_index(1, 1, 1)};

  /// Reassemble into an 8×8 operator on the spin space.
  [[nodiscard]] Op8 assemble() const;
};

/// Analytic Σz blocks. The forms above are for α = 1; for α < 1 the residual
/// Ising term adds to the diagonals. Requires E_Q = E_Q' (throws
/// std::invalid_argument otherwise).
SubspaceBlocks subspace_blocks(const SystemParams& params);

/// The Σz = −1 block rotated into {|A⟩, |T⟩, |E⟩} with
///   |A⟩ = |010⟩,
///   |T⟩ = (J1'|100⟩ + J2'|001⟩)/N,
///   |E⟩ = (J2'|100⟩ − J1'|001⟩)/N,   N = √(J1'² + J2'²).
/// |E⟩ is the exchange-dark eigenvector; the rotated matrix is
/// E_C [[−R, N, 0], [N, −1, 0], [0, 0, −1]].
struct AteFrame {
  Op3 hamiltonian = Op3::Zero();
  /// Columns |A⟩, |T⟩, |E⟩ expressed in the h1 basis {|010⟩, |100⟩, |001⟩}.
  Op3 basis = Op3::Zero();
};

/// Throws std::invalid_argument when J1 = J2 = 0 (rotation undefined).
AteFrame rotate_h1_to_ate(const SystemParams& params);

}  // namespace medgate
