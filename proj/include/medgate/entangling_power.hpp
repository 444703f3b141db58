#pragma once

#include <cstdint>

#include "medgate/core.hpp"

namespace medgate {

struct EntanglingPowerEstimate {
  double value = 0.0;
  double stderr_ = 0.0;  // 0 for closed-form values
  long samples = 0;
};

/// 1 − tr(ρ_A²) for a pure state on C^dim_a ⊗ C^dim_b (A most significant).
double linear_entropy(const Eigen::VectorXcd& psi, int dim_a, int dim_b);

/// Two-qubit overload.
double linear_entropy(const Vec4& psi);

/// Maximum-entry residual of a gate outside the
/// [[•,0,0,0],[0,•,•,0],[0,•,•,0],[0,0,0,•]] pattern.
double block_structure_residual(const Op4& u);

/// Closest unitary in Frobenius norm (polar factor W·V† of the SVD W·S·V†).
Op4 nearest_unitary(const Op4& u);

/// Haar Monte Carlo average of linear_entropy(U|ψ1⟩⊗|ψ2⟩).
///
/// Samples are split into fixed shards whose seeds are derived from `seed`,
/// so the result does not depend on `threads`. Rejects gates with leakage
/// above 1e-6 (the average is not defined for non-unitary maps).
EntanglingPowerEstimate entangling_power_mc(const LogicalGate& gate, long samples,
                                            std::uint64_t seed, int threads = 1);

/// Closed form for block gates (corner phases plus a central 2×2 block):
///
///   e = (1/18)[8 − 2|ψ|² − |ψ|⁴ − 2|ψ'|² − |ψ'|⁴ − 2|χ|² − 2|χ'|² − |χ|⁴ − |χ'|⁴
///              − 2 Re(e^{i(φ00+φ11)} conj(χχ')) − 2 Re(e^{i(φ00+φ11)} conj(ψψ'))]
///
/// where ψ = U11, χ' = U12, χ = U21, ψ' = U22. Invariant under a global phase.
/// Throws std::invalid_argument if the gate is not block structured or not
/// unitary (both to 1e-8).
double entangling_power_closed(const LogicalGate& gate);

}  // namespace medgate
